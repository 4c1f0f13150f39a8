"""Render a line of text into packed 1-bit pixels for fixture images."""

from __future__ import annotations

from PIL import Image, ImageDraw, ImageFont


def text_bitmap(text: str, size: int = 28, margin: int = 16) -> tuple[int, int, bytes]:
    """Return ``(width, height, pixels)``; 1 bit per pixel, 0 = black (BlackIsZero)."""
    font = ImageFont.load_default(size=size)
    left, top, right, bottom = font.getbbox(text)
    width = right - left + 2 * margin
    height = bottom - top + 2 * margin
    img = Image.new("1", (width, height), 1)
    ImageDraw.Draw(img).text((margin - left, margin - top), text, font=font, fill=0)
    return width, height, img.tobytes()
