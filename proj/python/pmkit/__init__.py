"""Process mining toolkit for clinical event logs."""

from ._core import (
    ConfigError,
    Error,
    Event,
    EventLog,
    InvalidArgument,
    ParseError,
    PetriNet,
    SimConfig,
    StructuralError,
    Trace,
    calibrate_drop_probability,
    compare_waves,
    covas_model,
    discover_dfg,
    dotted_chart_svg,
    fire_sequence,
    inject_noise,
    log_stats,
    occupancy,
    parse_csv,
    parse_pnml,
    parse_sim_config,
    parse_xes,
    read_log,
    replay_log,
    simulate,
    validate_net,
    variants,
    write_csv,
    write_log,
    write_pnml,
    write_xes,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
