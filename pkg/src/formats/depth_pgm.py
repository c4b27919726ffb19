"""
Карты глубины в 16-битном бинарном PGM (P5), миллиметры, 0 - невалидно.
"""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

import numpy as np

from ..constants import Units
from ..lifting import DepthMap
from .errors import BadMagic, FormatError, TruncatedFile


logger = logging.getLogger(__name__)

_MAGIC = b"P5"
_WHITESPACE = b" \t\r\n"


def _read_header(data: bytes) -> Tuple[int, int, int, int]:
    """(width, height, maxval, смещение данных)."""
    if data[:2] != _MAGIC:
        raise BadMagic(f"Ожидалась сигнатура P5, получено {data[:2]!r}")

    tokens: List[int] = []
    pos = 2
    while len(tokens) < 3:
        if pos >= len(data):
            raise TruncatedFile("Заголовок PGM оборван")
        byte = data[pos:pos + 1]
        if byte in (b" ", b"\t", b"\r", b"\n"):
            pos += 1
        elif byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise TruncatedFile("Заголовок PGM оборван в комментарии")
            pos = end + 1
        else:
            start = pos
            while pos < len(data) and data[pos:pos + 1] not in (b" ", b"\t", b"\r", b"\n", b"#"):
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise FormatError(f"Некорректное поле заголовка PGM: {token!r}")
            tokens.append(int(token))

    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise TruncatedFile("Нет разделителя после заголовка PGM")
    width, height, maxval = tokens
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise FormatError(f"Некорректный заголовок PGM: {width}x{height}, maxval {maxval}")
    return width, height, maxval, pos + 1


def read_depth(path: Union[str, Path]) -> DepthMap:
    """
    Читает карту глубины.

    Raises:
        BadMagic: Не P5
        TruncatedFile: Пикселей меньше объявленного
    """
    data = Path(path).read_bytes()
    width, height, maxval, offset = _read_header(data)

    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    expected = width * height * dtype.itemsize
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise TruncatedFile(
            f"{path}: объявлено {width * height} пикселей, "
            f"данных на {len(payload) // dtype.itemsize}"
        )

    millimeters = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.float64)
    valid = millimeters > 0
    return DepthMap(depth=np.where(valid, millimeters / Units.MM_PER_M, 0.0), valid=valid)


def depth_to_millimeters(depth: DepthMap) -> np.ndarray:
    """Глубина в мм (uint16): невалидные - 0, валидные - в [1, 65535]."""
    millimeters = np.rint(depth.depth * Units.MM_PER_M)
    clipped = np.count_nonzero(depth.valid & (millimeters > Units.MAX_DEPTH_MM))
    if clipped:
        logger.warning(f"Глубина больше {Units.MAX_DEPTH_MM} мм обрезана у {clipped} пикселей")
    millimeters = np.clip(millimeters, 1, Units.MAX_DEPTH_MM)
    return np.where(depth.valid, millimeters, 0).astype(np.uint16)


def write_depth(depth: DepthMap, path: Union[str, Path]) -> None:
    """Записывает карту глубины в 16-битный P5 (big-endian)."""
    header = f"P5\n{depth.width} {depth.height}\n{Units.MAX_DEPTH_MM}\n".encode("ascii")
    payload = depth_to_millimeters(depth).astype(">u2").tobytes()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(header + payload)


def depth_filename(frame: int) -> str:
    return f"{frame:06d}.pgm"


def read_depth_dir(directory: Union[str, Path]) -> Dict[int, DepthMap]:
    """
    Карты глубины директории NNNNNN.pgm по номеру кадра.

    Raises:
        FormatError: Имя файла не номер кадра
    """
    maps: Dict[int, DepthMap] = {}
    for path in sorted(Path(directory).glob("*.pgm")):
        if not path.stem.isdigit():
            raise FormatError(f"Имя карты глубины не номер кадра: {path.name}")
        maps[int(path.stem)] = read_depth(path)
    return dict(sorted(maps.items()))


def write_depth_dir(maps: Mapping[int, DepthMap], directory: Union[str, Path]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for frame, depth in maps.items():
        write_depth(depth, directory / depth_filename(frame))
