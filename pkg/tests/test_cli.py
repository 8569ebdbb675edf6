import json

import pytest

from windlab.cli import main, read_config_file, validate


def run_cli(tmp_path, experiment, out_name="out.csv", *sets, seed=None, fmt="csv"):
    out = tmp_path / out_name
    argv = [experiment, "--out", str(out), "--format", fmt]
    if seed is not None:
        argv += ["--seed", str(seed)]
    for s in sets:
        argv += ["--set", s]
    code = main(argv)
    return code, out


PROP_SETS = [
    "t_b=1", "k=4", "r_min=-3", "r_max=3", "m_sites=7",
    "i_a=2", "i_b=4", "mass=1", "h=1",
]


def test_sample_deterministic_byte_identical(tmp_path):
    code1, out1 = run_cli(tmp_path, "sample", "a.csv", "count=200", seed=99)
    code2, out2 = run_cli(tmp_path, "sample", "b.csv", "count=200", seed=99)
    assert code1 == code2 == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sample_histogram_artifact(tmp_path):
    code, out = run_cli(tmp_path, "sample", "h.csv", "count=1000", "bins=4", seed=3)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "bin_lo,bin_hi,frequency"
    freqs = [float(l.split(",")[2]) for l in lines[1:]]
    assert sum(freqs) == pytest.approx(1.0)


def test_interfere_reports_quadrupling(tmp_path):
    code, out = run_cli(tmp_path, "interfere", "i.csv")
    assert code == 0
    header, row = out.read_text().splitlines()
    vals = dict(zip(header.split(","), (float(x) for x in row.split(","))))
    assert vals["p_union"] == pytest.approx(4 * vals["p_single"], abs=1e-12)
    assert vals["p_additive"] == pytest.approx(2 * vals["p_single"], abs=1e-12)


def test_interfere_amplitude_table(tmp_path):
    code, out = run_cli(
        tmp_path, "interfere", "t.csv", "table_points=5", "table_r_lo=0", "table_r_hi=1", "n=0.25"
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,re,im,prob"
    assert len(lines) == 6


def test_propagate_dual_method_cross_check(tmp_path):
    code, out = run_cli(tmp_path, "propagate", "p.csv", *PROP_SETS, "method=both")
    assert code == 0
    assert out.read_text().splitlines()[0].startswith("k,m_sites,epsilon,re_K")


def test_propagate_missing_field_names_it(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "propagate", "bad.csv", "t_b=1", "k=4")
    assert code == 1
    err = capsys.readouterr().err
    assert "mass" in err


def test_validate_valid_propagate_config():
    cfg = dict(s.split("=") for s in PROP_SETS)
    assert validate("propagate", cfg) == []


def test_validate_k_zero():
    cfg = dict(s.split("=") for s in PROP_SETS)
    cfg["k"] = "0"
    diags = validate("propagate", cfg)
    assert len(diags) == 1 and "k" in diags[0]


def test_validate_capacity():
    cfg = dict(s.split("=") for s in PROP_SETS)
    cfg["k"] = "12"
    cfg["m_sites"] = "9"
    cfg["method"] = "bruteforce"
    diags = validate("propagate", cfg)
    assert any(d.startswith("capacity") for d in diags)


def test_capacity_exit_code(tmp_path):
    code, _ = run_cli(
        tmp_path, "pathsum", "cap.csv",
        "t_b=1", "k=12", "r_min=-3", "r_max=3", "m_sites=9", "i_a=0", "i_b=0", "mass=1",
    )
    assert code == 2


def test_unknown_experiment_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["warp", "--out", str(tmp_path / "x.csv")])


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# two-media refraction\nv1 = 1\nv2 = 0.25\n")
    out = tmp_path / "f.csv"
    code = main(["fermat", "--config", str(cfg), "--out", str(out), "--set", "v2=0.5"])
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert float(row[1]) == 0.5  # flag wins over file


def test_read_config_rejects_garbage(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this is not a key value line\n")
    from windlab.errors import InvalidInputError

    with pytest.raises(InvalidInputError):
        read_config_file(str(cfg))


def test_manifest_written_and_complete(tmp_path):
    code, out = run_cli(tmp_path, "fermat", "f.csv", "v1=1", "v2=0.5")
    assert code == 0
    manifest = json.loads((tmp_path / "f.csv.manifest.json").read_text())
    assert manifest["experiment"] == "fermat"
    assert manifest["config"]["v1"] == "1"
    assert manifest["config"]["v2"] == "0.5"
    assert "windlab_version" in manifest and "elapsed_seconds" in manifest


def test_json_format(tmp_path):
    code, out = run_cli(tmp_path, "interfere", "i.json", fmt="json")
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload[0]["p_union"] == pytest.approx(4.0)


def test_pathsum_winding_report_and_path_dump(tmp_path):
    sets = ["t_b=1", "k=2", "r_min=0", "r_max=1", "m_sites=3", "i_a=0", "i_b=2", "mass=1", "h=1"]
    code, out = run_cli(tmp_path, "pathsum", "w.csv", *sets)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "path_id,m,action"
    assert len(lines) == 4  # 3 paths
    code, out2 = run_cli(tmp_path, "pathsum", "d.csv", *sets, "dump_path_id=1")
    assert code == 0
    dump = out2.read_text().splitlines()
    assert dump[0] == "step,t,r"
    assert len(dump) == 4  # k+1 nodes


def test_converge_rows(tmp_path):
    code, out = run_cli(tmp_path, "converge", "c.csv", "ks=2,4")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("k,m_sites,epsilon")
    assert len(lines) == 3
