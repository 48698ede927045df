"""Smoke test for the follow_py extension module.

Build and install it first:

    pip install --no-build-isolation -e crates/python
"""

import math
import os
import tempfile

import follow_py as fp


def main():
    assert fp.iou((0.0, 0.0, 0.2, 0.5), (0.0, 0.0, 0.2, 0.5)) == 1.0
    assert fp.iou((0.0, 0.0, 0.1, 0.5), (0.8, 0.0, 0.1, 0.5)) == 0.0
    assert abs(fp.cosine_similarity([1.0, 0.0], [0.8, 0.6]) - 0.8) < 1e-15
    m = fp.bank_mean([[1.0, 0.0], [0.0, 1.0]])
    assert abs(m[0] - math.sqrt(0.5)) < 1e-12
    try:
        fp.cosine_similarity([2.0, 0.0], [1.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("non-unit vector accepted")

    assert len(fp.variant_names()) == 7
    config = fp.SimConfig.from_toml("seed = 3\nmax_duration = 15.0\n")
    assert config.seed == 3 and config.max_duration == 15.0

    bank = fp.register(config)
    assert bank.mode == "full_360" and bank.torso_count > 0
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "bank.fbnk")
        bank.save(path)
        assert fp.FeatureBank.load(path).torso_mean() == bank.torso_mean()

    a = fp.run_trial(config, "ours")
    b = fp.run_trial(config, "ours", bank=bank)
    assert a.log_jsonl() == b.log_jsonl()
    assert fp.replay(a.log_jsonl()) == a.metrics
    print("trial:", a, a.metrics)

    rows, trends = fp.run_suite(config.with_max_duration(10.0), ["ours", "ours_wo_reid"], [0, 1])
    assert [r["variant"] for r in rows] == ["ours", "ours_wo_reid"]
    assert len(trends) == 4
    for name, passed, detail in trends:
        print("PASS" if passed else "FAIL", name, detail)
    print("smoke test ok")


if __name__ == "__main__":
    main()
