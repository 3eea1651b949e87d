"""Python bindings for the hopscotch music engine core."""

from ._hopscotch import (
    OscDecodeError,
    OscEncodeError,
    ScriptError,
    SessionParseError,
    Sieve,
    SieveParseError,
    SlipError,
    button_pressed,
    grade,
    intervals,
    metrics,
    osc_decode,
    osc_encode,
    recorded_commands,
    render_wav,
    replay,
    run_script,
    simulate,
    slip_frame,
    slip_unframe,
    wav_onsets,
)

__all__ = [
    "OscDecodeError",
    "OscEncodeError",
    "ScriptError",
    "SessionParseError",
    "Sieve",
    "SieveParseError",
    "SlipError",
    "button_pressed",
    "grade",
    "intervals",
    "metrics",
    "osc_decode",
    "osc_encode",
    "recorded_commands",
    "render_wav",
    "replay",
    "run_script",
    "simulate",
    "slip_frame",
    "slip_unframe",
    "wav_onsets",
]
