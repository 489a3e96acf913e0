# salient/consolidation/overlays.py

import colorsys
import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
from PIL import Image, ImageDraw

from .dataset import SalientDataset, SalientItem

logger = logging.getLogger(__name__)

_BACKGROUND = (24, 24, 24)
_MASK_ALPHA = 0.45


def label_color(label: int) -> Tuple[int, int, int]:
    """Stable, well-separated color per object label (golden-ratio hue walk)."""
    hue = (label * 0.618033988749895) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.75, 0.95)
    return int(r * 255), int(g * 255), int(b * 255)


def render_frame(ds: SalientDataset, items: List[SalientItem]) -> Image.Image:
    canvas = np.empty((ds.height, ds.width, 3), dtype=np.float64)
    canvas[:] = _BACKGROUND
    for item in items:
        if item.mask is not None:
            pixels = item.mask.to_array()
            canvas[pixels] = (1 - _MASK_ALPHA) * canvas[pixels] + _MASK_ALPHA * np.asarray(label_color(item.object_label))
    image = Image.fromarray(canvas.round().astype(np.uint8))
    draw = ImageDraw.Draw(image)
    for item in items:
        color = label_color(item.object_label)
        x0, y0, x1, y1 = item.bbox.to_xyxy()
        draw.rectangle([x0, y0, x1 - 1, y1 - 1], outline=color, width=2)
        draw.text((x0 + 3, y0 + 2), f"object_{item.object_label}", fill=color)
    return image


def render_overlays(ds: SalientDataset, out_dir: Union[str, Path]) -> List[Path]:
    """Write one annotated PNG per dataset frame as frame_XXXXXX.png. Returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if ds.width == 0 or ds.height == 0:
        logger.warning(f"Dataset '{ds.video_id}' has no frame size; no overlays rendered.")
        return []
    by_frame: Dict[int, List[SalientItem]] = {}
    for item in ds.items:
        by_frame.setdefault(item.frame_index, []).append(item)
    written = []
    for frame, items in sorted(by_frame.items()):
        path = out_dir / f"frame_{frame:06d}.png"
        render_frame(ds, items).save(path)
        written.append(path)
    logger.info(f"Rendered {len(written)} overlay frames to {out_dir}")
    return written
