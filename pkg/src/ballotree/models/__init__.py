from .report import REPORT_SCHEMA, SweepMode, TreeStatsReport, VerificationReport, Witness

__all__ = ["REPORT_SCHEMA", "SweepMode", "TreeStatsReport", "VerificationReport", "Witness"]
