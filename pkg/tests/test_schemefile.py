import pytest

from fdstab.catalog import ab3_centered, crank_nicolson, leapfrog
from fdstab.errors import ConfigError
from fdstab.schemefile import dump_scheme, load_scheme, parse_scheme, resolve_scheme, shipped_path

SHIPPED = ["leapfrog", "leapfrog_dirichlet", "leapfrog_extrapolation2", "lax_friedrichs", "ab3_centered",
           "wave_leapfrog"]


def same(a, b):
    return (a.name, a.d, a.s, a.r, a.p, a.q, a.lam, a.interior, a.boundary) == \
           (b.name, b.d, b.s, b.r, b.p, b.q, b.lam, b.interior, b.boundary)


@pytest.mark.parametrize("scheme", [leapfrog(), ab3_centered(), crank_nicolson()])
def test_round_trip(scheme):
    assert same(parse_scheme(dump_scheme(scheme)), scheme)


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_load(name):
    sch = load_scheme(shipped_path(name))
    assert dump_scheme(sch) == shipped_path(name).read_text()


def test_resolve_by_name_and_path(tmp_path):
    path = tmp_path / "lf.toml"
    path.write_text(dump_scheme(leapfrog()))
    assert same(resolve_scheme(str(path)), resolve_scheme("leapfrog"))


def test_unknown_key_reports_line():
    text = dump_scheme(leapfrog()) + "bogus = 1\n"
    text = text.replace("[[boundary]]\n", "[[boundary]]\nextra = 3\n")
    with pytest.raises(ConfigError, match=r"x\.toml:\d+: unknown key 'extra' in boundary entry 0"):
        parse_scheme(text, "x.toml")


def test_unknown_table_key():
    text = dump_scheme(leapfrog()).replace("d = 1\n", "d = 1\ncolor = 2\n")
    with pytest.raises(ConfigError, match=r"f\.toml:5: unknown key 'color' in \[dimensions\]"):
        parse_scheme(text, "f.toml")


def test_missing_and_mistyped_values():
    text = dump_scheme(leapfrog())
    with pytest.raises(ConfigError, match="missing key 's'"):
        parse_scheme(text.replace("s = 1\n", ""))
    with pytest.raises(ConfigError, match="must be an integer"):
        parse_scheme(text.replace("s = 1\n", "s = 1.5\n"))
    with pytest.raises(ConfigError):
        parse_scheme("name = [\n")


def test_missing_bundled_name():
    with pytest.raises(ConfigError):
        resolve_scheme("no_such_scheme")
