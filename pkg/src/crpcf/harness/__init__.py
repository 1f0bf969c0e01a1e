from .config import ConfigError, format_config, load_config, parse_config
from .output import emit_csv, emit_plot_script, read_csv, table_to_csv
from .sweep import COLUMNS, SweepRow, SweepSpec, SweepTable, preset_sweep, run_sweep
