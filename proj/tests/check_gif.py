"""Decode an emitted GIF and compare it against the PNG frames."""
import sys
from pathlib import Path

from PIL import Image, ImageSequence


def main(gif_path, frames_dir, frame_count, fps):
    frame_count, fps = int(frame_count), float(fps)
    gif = Image.open(gif_path)
    frames = [f.convert("RGBA") for f in ImageSequence.Iterator(gif)]
    durations = [f.info.get("duration", 0) for f in ImageSequence.Iterator(Image.open(gif_path))]
    assert len(frames) == frame_count, f"{len(frames)} frames, expected {frame_count}"
    total = sum(durations)
    assert abs(total - 1000.0 * frame_count / fps) <= 10, f"total duration {total} ms"
    assert gif.info.get("loop") == 0, "GIF does not loop forever"

    pngs = sorted(Path(frames_dir).glob("frame_*.png"))
    assert len(pngs) == frame_count, f"{len(pngs)} PNG frames"
    for k, (g, p) in enumerate(zip(frames, pngs)):
        ref = Image.open(p).convert("RGBA")
        assert g.size == ref.size, f"frame {k}: size {g.size} vs {ref.size}"
        worst = 0
        for a, b in zip(g.getdata(), ref.getdata()):
            if b[3] < 128:
                assert a[3] == 0, f"frame {k}: transparent pixel decoded opaque"
                continue
            assert a[3] == 255, f"frame {k}: opaque pixel decoded transparent"
            worst = max(worst, *(abs(a[c] - b[c]) for c in range(3)))
        assert worst <= 26, f"frame {k}: color error {worst} exceeds quantization step"
    print(f"ok: {frame_count} frames, {total} ms")


if __name__ == "__main__":
    main(*sys.argv[1:])
