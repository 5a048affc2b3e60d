import numpy as np
import pytest

import robustlrt as r


@pytest.fixture(scope="session")
def ref_model():
    return r.reference_model()


@pytest.fixture(scope="session")
def grid4096():
    return r.IntensityGrid(4096)


@pytest.fixture(scope="session")
def ref_gridded(ref_model, grid4096):
    return r.to_grid(ref_model.h0, grid4096), r.to_grid(ref_model.h1, grid4096)


@pytest.fixture(scope="session")
def band_pair(ref_gridded):
    p0, p1 = ref_gridded
    b0 = r.build_band(p0, r.BandSpec(), r.Hypothesis.H0)
    b1 = r.build_band(p1, r.BandSpec(), r.Hypothesis.H1)
    return b0, b1


@pytest.fixture(scope="session")
def band_solution(band_pair):
    b0, b1 = band_pair
    return r.solve_lfds(b0, b1, delta=1e-9), b0, b1


@pytest.fixture(scope="session")
def outlier_pair(ref_gridded):
    p0, p1 = ref_gridded
    spec = r.BandSpec.outlier(0.4)
    b0 = r.build_band(p0, spec, r.Hypothesis.H0)
    b1 = r.build_band(p1, spec, r.Hypothesis.H1)
    return b0, b1


@pytest.fixture(scope="session")
def outlier_solution(outlier_pair):
    b0, b1 = outlier_pair
    return r.solve_lfds(b0, b1, delta=1e-9), b0, b1


def uniform_density(grid):
    return r.DensityGrid(grid, np.ones(grid.n_points) / (grid.hi - grid.lo))
