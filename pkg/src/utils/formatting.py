from typing import Union
import math
import re
import logging

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6

Number = Union[int, float]


def round_sig(value: Number, digits: int = SIGNIFICANT_DIGITS) -> Number:
    """
    有効数字 digits 桁に丸める (int はそのまま)
    """
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if not math.isfinite(value):
        raise ValueError(f"Non-finite metric value: {value}")
    return float(f"{value:.{digits}g}")


def format_number(value: Number, digits: int = SIGNIFICANT_DIGITS) -> str:
    """
    CSV出力用の固定書式
    """
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}g}"


def sanitize_filename(filename: str) -> str:
    """
    ファイル名を安全な形式に変換
    """
    filename = re.sub(r'[<>:"/\\|?*]', '', filename)
    filename = re.sub(r'\s+', '_', filename)
    filename = filename.strip('._')
    return filename or 'report'
