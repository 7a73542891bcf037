from .container import decode_container, encode_container, load_container, save_container
from .json_codec import (
    dumps,
    graph_from_dict,
    graph_to_dict,
    load_run_config,
    plan_from_dict,
    plan_to_dict,
    read_json,
    schedule_to_dict,
    tile_plan_to_dict,
    write_json,
)
from .model_codec import load_model, save_model
from .quant_codec import load_quantized, save_quantized, sidecar_path
from .waveform_io import read_input, read_waveform, read_windows, write_recording, write_windows

__all__ = [
    "decode_container",
    "dumps",
    "encode_container",
    "graph_from_dict",
    "graph_to_dict",
    "load_container",
    "load_model",
    "load_quantized",
    "load_run_config",
    "plan_from_dict",
    "plan_to_dict",
    "read_input",
    "read_json",
    "read_waveform",
    "read_windows",
    "save_container",
    "save_model",
    "save_quantized",
    "schedule_to_dict",
    "sidecar_path",
    "tile_plan_to_dict",
    "write_json",
    "write_recording",
    "write_windows",
]
