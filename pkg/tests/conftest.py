# tests/conftest.py
import pytest
import os

from src.hardware.loader import load_hardware_spec
from src.utils.config_loader import load_config
from src.workload.presets import get_preset


@pytest.fixture(scope="session", autouse=True)
def set_test_environment():
    """
    テスト全体の共通フィクスチャ。
    リファレンス構成のプロファイルを固定し、設定キャッシュを空にする。
    """
    os.environ["SIM_PROFILE"] = "reference"
    load_config.cache_clear()

    yield

    load_config.cache_clear()


@pytest.fixture
def hw():
    return load_hardware_spec()


@pytest.fixture
def gpt2():
    return get_preset("gpt2-medium")


@pytest.fixture
def bert():
    return get_preset("bert-large")


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "results"
