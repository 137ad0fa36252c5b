"""Long-form speech transcription toolkit.

VAD cut & merge chunk planning, batched transcription over pluggable ASR
backends, CTC forced alignment for word timestamps, transcript text
normalization and WER scoring.
"""

__version__ = "0.1.0"

from .alignment import (  # noqa: E402
    AlignedWord,
    EmissionMatrix,
    LabelVocab,
    align_chunk,
    ctc_align,
    path_to_word_timings,
    read_emissions,
    tokenize_for_alignment,
)
from .normalize import NormalizerConfig, normalize  # noqa: E402
from .scoring import EditCounts, WerReport, edit_align, score_corpus, wer  # noqa: E402
from .segmentation import (  # noqa: E402
    AudioChunk,
    FrameProbSeries,
    SegmentationConfig,
    VoiceSegment,
    binarize,
    cut_segment,
    energy_vad,
    merge_segments,
    plan_chunks,
    read_probs,
)
from .transcript import Transcript  # noqa: E402
from .transcription import (  # noqa: E402
    ChunkTranscript,
    assemble_transcript,
    command_backend,
    fixture_backend,
    transcribe_chunks,
)
