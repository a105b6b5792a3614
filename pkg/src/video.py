"""
Assemble value-function frames into a video.

Uses opencv-python to turn the sequence of PNG frames written during a run
into an AVI file. The first frame defines the frame size of the video.
"""

from pathlib import Path

import cv2


def make_video(frames_dir, output, fps: int = 15) -> Path:
    """
    Write every `img_*.png` in frames_dir, in name order, to `output`.

    Args:
        frames_dir: Folder holding the frames.
        output: Path of the video file to create.
        fps (int): Frames per second.

    Returns:
        Path: The video path.

    Raises:
        RuntimeError: If there are no frames or a frame cannot be read.
    """
    frames = sorted(Path(frames_dir).glob("img_*.png"))
    if not frames:
        raise RuntimeError(f"No frames found in {frames_dir}. Cannot create video.")

    # Read first frame to get size
    frame = cv2.imread(str(frames[0]))
    if frame is None:
        raise RuntimeError(f"Could not read first frame: {frames[0]}")

    height, width, layers = frame.shape

    fourcc = cv2.VideoWriter_fourcc(*"DIVX")
    video = cv2.VideoWriter(str(output), fourcc, fps, (width, height))

    for frame_path in frames:
        img = cv2.imread(str(frame_path))
        if img is None:
            raise RuntimeError(f"Could not read frame: {frame_path}")
        # Frames of a different size would be dropped silently by the writer
        if img.shape[:2] != (height, width):
            img = cv2.resize(img, (width, height))
        video.write(img)

    video.release()
    return Path(output)
