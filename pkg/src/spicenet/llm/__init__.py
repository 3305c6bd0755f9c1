from .bench import BenchmarkDesign, BenchTable, default_suite, load_suite, run_benchmark
from .client import HttpClient, LlmClient, ReplayClient, ReplayExhausted, TransportError
from .dataset import DatasetRecord, export_finetune_records
from .prompts import (
    ChatMessage,
    NoNetlistFound,
    build_component_id_prompt,
    build_netlist_prompt,
    build_repair_prompt,
    extract_netlist_from_response,
)
from .repair import RepairAborted, RepairStatus, RepairTrace, generate_from_annotation, repair_loop
