"""共用 pytest fixtures。"""

import numpy as np
import pytest

from tailbound.bench.synthetic import rotated_gaussian
from tailbound.bounds.levels import LevelSpec
from tailbound.transform.model import TransformModel
from tailbound.transform.pca import pca_basis


@pytest.fixture
def gaussian_data() -> np.ndarray:
    """600 個 16 維標準常態向量。"""
    return np.random.default_rng(42).standard_normal((600, 16))


@pytest.fixture
def gaussian_queries() -> np.ndarray:
    return np.random.default_rng(7).standard_normal((20, 16))


@pytest.fixture
def compact_data() -> np.ndarray:
    """特徵值指數衰減的旋轉高斯資料（前 600 筆為 base，後 20 筆為查詢）。"""
    return rotated_gaussian(620, 32, decay=8.0, seed=3)


@pytest.fixture
def pca_model(compact_data) -> TransformModel:
    """以 PCA 基底作為 warm start、A = 0 的轉換模型。"""
    from tailbound.transform.cayley import SkewParams

    basis = pca_basis(compact_data[:600])
    return TransformModel.compose(SkewParams.zeros(32), warm_start=basis)


@pytest.fixture
def levels16() -> LevelSpec:
    return LevelSpec.equal_width(16, 8)
