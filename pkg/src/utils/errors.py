# src/utils/errors.py

"""
シミュレータ共通の例外クラス
CLIはこの種類で終了コードを決める
"""
from typing import Optional


class SimulatorError(Exception):
    """シミュレータ例外の基底クラス"""

    exit_code = 1


class ConfigError(SimulatorError, ValueError):
    """設定値の不正"""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class InfeasibleStageError(SimulatorError):
    """パイプラインステージが遅延制約を満たせない"""

    exit_code = 3

    def __init__(self, stage_id: str, kernel_id: str, kernel_delay: float, bound: float):
        super().__init__(
            f"Stage {stage_id} kernel {kernel_id} takes {kernel_delay:.6g} s, "
            f"exceeding the allowed {bound:.6g} s"
        )
        self.stage_id = stage_id
        self.kernel_id = kernel_id
        self.kernel_delay = kernel_delay
        self.bound = bound


class UnsupportedDataflowError(SimulatorError, NotImplementedError):
    """未実装のデータフロー (WS / IS)"""


class RoutingError(SimulatorError):
    """経路が見つからない (接続されたトポロジでは内部エラー)"""


class PlacementError(SimulatorError, KeyError):
    """ステージがどのノードにも配置されていない"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ''


def require(condition: bool, field: str, message: str):
    """条件を満たさなければフィールド名付きのConfigErrorを送出"""
    if not condition:
        raise ConfigError(f"Invalid '{field}': {message}", field=field)
