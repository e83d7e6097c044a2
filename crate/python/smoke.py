"""Smoke test for the ssrlsc_py extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install --force-reinstall target/wheels/ssrlsc_py-*.whl
"""

import math
import os
import tempfile

import ssrlsc_py as s


def main():
    cube, grid = s.make_synthetic(classes=3, blocks_per_class=2, block_size=8, bands=16, seed=0)
    assert (cube.height, cube.width, cube.bands) == (16, 24, 16), cube
    assert grid.classes == 3 and sum(grid.class_counts()) == 6 * 64

    with tempfile.TemporaryDirectory() as tmp:
        hdr = os.path.join(tmp, "cube.hdr")
        cube.save(hdr, dtype="f64", byte_order="big", interleave="bip")
        assert s.HyperCube.load(hdr).values() == cube.values()

    filtered = s.filter_cube(cube, radius=1, epsilon=0.01)
    assert filtered.bands == cube.bands

    vals, _ = s.sym_eig([[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
    assert vals == [3.0, 2.0, 1.0], vals

    proj = s.solve_pencil([[2.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]], 1)
    assert math.isclose(proj.eigenvalues[0], 2.0, rel_tol=1e-6)

    assert s.metrics([[3, 1], [0, 4]]) == (0.875, 0.875, 0.75)

    cfg = s.ExperimentConfig("ssrlsc", cube.bands)
    cfg.dims = [2]
    cfg.runs = 5
    report = s.run_experiment(cube, grid, cfg)
    oa, aa, kappa = report.mean(2)
    assert oa >= 0.95, oa
    assert report.to_csv(timing=False).startswith("axis,run,dim,oa,aa,kappa,seconds\n")

    try:
        s.solve_pencil([[1.0, 2.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]], 1)
    except ValueError:
        pass
    else:
        raise AssertionError("asymmetric pencil accepted")

    print(f"ssrlsc_py smoke test passed: mean OA {oa:.4f}, kappa {kappa:.4f}")


if __name__ == "__main__":
    main()
