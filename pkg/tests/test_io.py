import json

import numpy as np

from locverify import io
from locverify.channel import ChannelParams, generate_dataset
from locverify.nn import CurvePoint, LearningCurve


def test_dataset_round_trip(tmp_path, bs4):
    data = generate_dataset(bs4, ChannelParams(300, 500), 25, 0.4, seed=3)
    path = io.write_dataset(tmp_path / "d.csv", data, {"seed": 3})
    text = path.read_text()
    assert text.startswith("# {")
    assert "idx,label,x_c,y_c,u_1,u_2,u_3,u_4,y_1,y_2,y_3,y_4\n" in text
    first = text.split("y_4\n")[1].splitlines()[0].split(",")
    assert all(len(v.split(".")[1]) == 6 for v in first[2:])

    meta = json.loads((tmp_path / "d.json").read_text())
    assert meta == {"seed": 3, "n": 25, "malicious_fraction": 0.4,
                    "thermal_noise_std_ns": 300.0, "nlos_std_ns": 500.0, "n_bs": 4}
    back = io.read_dataset(path)
    np.testing.assert_array_equal(back.labels, data.labels)
    np.testing.assert_allclose(back.observed_toa, data.observed_toa, atol=5e-7)
    assert back.params.nlos_std == 500.0 and back.seed == 3
    assert io.read_comment_config(path) == {"seed": 3}


def test_extra_columns(tmp_path, bs4):
    data = generate_dataset(bs4, ChannelParams(), 3, 0.5, seed=1)
    text = io.dataset_csv(data, extra_columns={"lrt_decision": np.array([1, 0, 1])})
    rows = text.splitlines()
    assert rows[0].endswith(",lrt_decision")
    assert [r.split(",")[-1] for r in rows[1:]] == ["1", "0", "1"]


def test_curve_csv():
    curve = LearningCurve([CurvePoint(1, 0.5, 0.25, None), CurvePoint(2, 0.125, 0.0, 0.75)])
    text = io.curve_csv(curve, {"a": 1})
    body = [l for l in text.splitlines() if not l.startswith("#")]
    assert body == ["second,total_error,alpha,beta", "1,0.500000,0.250000,nan", "2,0.125000,0.000000,0.750000"]


def test_atomic_write_leaves_no_temp(tmp_path):
    io.atomic_write(tmp_path / "sub" / "x.txt", "hello")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["x.txt"]
