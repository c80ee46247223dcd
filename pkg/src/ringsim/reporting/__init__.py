"""扫描结果文本报告"""

from .report import MISSING, build_report_context, emit_report, format_cell

__all__ = ["MISSING", "build_report_context", "emit_report", "format_cell"]
