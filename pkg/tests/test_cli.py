import json

import pytest

from randersflag.main import parse_vector, run
from randersflag.errors import InputError


def invoke(capsys, *argv):
    with pytest.raises(SystemExit) as excinfo:
        run(list(argv))
    captured = capsys.readouterr()
    return excinfo.value.code, captured.out, captured.err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def sections(out):
    return {r['section']: r for r in records(out) if r['record'] == 'result'}


def test_parse_vector():
    assert list(parse_vector("1, 0,2.5", 3, "y")) == [1.0, 0.0, 2.5]
    with pytest.raises(InputError):
        parse_vector("1,2", 3, "y")
    with pytest.raises(InputError):
        parse_vector("1,a,2", 3, "y")


def test_version(capsys):
    code, out, _ = invoke(capsys, "--version")
    assert code == 0
    assert "randersflag version" in out


def test_validate_u2_json(capsys):
    code, out, _ = invoke(capsys, "validate", "u2", "--format", "json")
    assert code == 0
    rows = records(out)
    assert rows[0]['record'] == 'run'
    assert rows[0]['command'] == 'validate'
    assert len(rows[0]['digest']) == 64

    found = sections(out)
    assert found['algebra']['verdict']
    assert found['algebra']['jacobi_defect'] == 0.0
    assert found['randers']['is_berwald']
    assert found['curvature']['verdict']
    assert found['puttmann']['verdict']


def test_validate_table(capsys):
    code, out, _ = invoke(capsys, "validate", "s2_homogeneous")
    assert code == 0
    assert "split" in out
    assert "puttmann" in out


def test_validate_heisenberg_skips_puttmann(capsys):
    code, out, err = invoke(capsys, "validate", "heisenberg3", "--format", "json")
    assert code == 0
    assert 'puttmann' not in sections(out)
    assert "not bi-invariant" in err


def test_flag_mixed(capsys):
    code, out, _ = invoke(capsys, "flag", "u2", "--y", "1,0,0,1", "--u", "0,1,0,0", "--format", "json")
    assert code == 0
    result = sections(out)['flag']
    assert result['k_printed'] == pytest.approx(-1.0 / 7.0, abs=1e-12)
    assert result['k_corrected'] == pytest.approx(result['k_oracle'], abs=1e-12)
    names = [r['name'] for r in records(out) if r['record'] == 'discrepancy']
    assert "k_printed vs k_oracle" in names


def test_flag_dimension_mismatch(capsys):
    code, _, err = invoke(capsys, "flag", "u2", "--y", "1,0,0", "--u", "0,1,0,0")
    assert code == 1
    assert "Error:" in err


def test_scan_is_deterministic(capsys):
    argv = ("scan", "u2", "--n", "40", "--seed", "3", "--format", "json")
    first = invoke(capsys, *argv)
    second = invoke(capsys, *argv, "--workers", "1")
    assert first[0] == second[0] == 0
    assert first[1] == second[1]
    assert sections(first[1])['scan']['count'] == 40


def test_compare_is_deterministic(capsys):
    argv = ("compare", "su2", "--n", "20", "--seed", "5", "--format", "json")
    first = invoke(capsys, *argv, "--workers", "4")
    second = invoke(capsys, *argv, "--workers", "2")
    assert first[1] == second[1]
    assert sections(first[1])['compare general_corrected']['max'] < 1e-10


def test_scan_table_has_histogram(capsys):
    code, out, _ = invoke(capsys, "scan", "su2_berger_2", "--n", "30")
    assert code == 0
    assert "worst_discrepancy" in out


def test_check_list(capsys):
    code, out, _ = invoke(capsys, "check", "--list")
    assert code == 0
    for name in ("berwald", "perfect", "ys-positive", "ys-negative", "ys-zero", "milnor", "constant"):
        assert name in out


def test_check_ys_positive(capsys):
    code, out, _ = invoke(capsys, "check", "u2", "ys-positive", "--k", "0.25", "--format", "json")
    assert code == 0
    result = sections(out)['ys-positive']
    assert result['verdict'] is False
    assert result['first_failure'] == "non-parallel Killing"


def test_usage_errors_exit_2(capsys):
    code, _, err = invoke(capsys, "check", "u2", "ys-positive")
    assert code == 2
    assert "--k" in err

    code, _, _ = invoke(capsys, "check", "u2", "nonsense")
    assert code == 2

    code, _, _ = invoke(capsys, "scan", "u2", "--n", "0")
    assert code == 2


def test_input_errors_exit_1(capsys, data_dir):
    code, _, err = invoke(capsys, "validate", str(data_dir / "broken_jacobi.json"))
    assert code == 1
    assert "jacobi_defect=0.3" in err

    code, _, _ = invoke(capsys, "validate", str(data_dir / "strong_drift.json"))
    assert code == 1

    code, _, _ = invoke(capsys, "validate", "u2", "--tol", "bogus=1")
    assert code == 1


def test_missing_command(capsys):
    code, _, _ = invoke(capsys)
    assert code == 2


def test_scan_on_space_forms(capsys):
    code, out, err = invoke(capsys, "scan", "su2", "--n", "1000", "--seed", "0", "--format", "json")
    assert code == 0, err
    scan = sections(out)['scan']
    assert scan['count'] == 1000
    assert scan['min'] == pytest.approx(0.25, abs=1e-12)
    assert scan['max'] == pytest.approx(0.25, abs=1e-12)
    assert sum(scan['histogram']) == 1000

    code, out, err = invoke(capsys, "scan", "s2_homogeneous", "--n", "200", "--format", "json")
    assert code == 0, err
    assert sections(out)['scan']['min'] == pytest.approx(1.0, abs=1e-12)


def test_check_constant_on_sphere(capsys):
    code, out, err = invoke(capsys, "check", "s2_homogeneous", "constant", "--format", "json")
    assert code == 0, err
    result = sections(out)['constant']
    assert result['verdict'] is True
    assert result['k_estimate'] == pytest.approx(1.0, abs=1e-12)


def test_compare_on_sphere_skips_group_formulas(capsys):
    code, out, _ = invoke(capsys, "compare", "s2_homogeneous", "--n", "50", "--format", "json")
    assert code == 0
    found = sections(out)
    assert found['compare biinvariant_printed']['max'] is None
    assert found['compare biinvariant_corrected']['note'] == "skipped: nontrivial isotropy"
    names = [r['name'] for r in records(out) if r['record'] == 'discrepancy']
    assert "biinvariant_printed" not in names


def test_milnor_check_refuses_sphere(capsys):
    code, _, err = invoke(capsys, "check", "s2_homogeneous", "milnor", "--x", "1,0,0")
    assert code == 1
    assert "nontrivial isotropy" in err
