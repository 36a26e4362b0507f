from shared_arrangements.dataflow.channels import Exchange, Message, Pipeline
from shared_arrangements.dataflow.input import Capture, InputHandle, InputOperator, Probe, accumulate
from shared_arrangements.dataflow.operator import InputPort, Operator, OutputPort, Stream
from shared_arrangements.dataflow.progress import Location, ProgressTracker
from shared_arrangements.dataflow.scope import Dataflow, Scope
from shared_arrangements.dataflow.worker import Cluster, OperatorDefaults, Worker

__all__ = [
    "Capture",
    "Cluster",
    "Dataflow",
    "Exchange",
    "InputHandle",
    "InputOperator",
    "InputPort",
    "Location",
    "Message",
    "Operator",
    "OperatorDefaults",
    "OutputPort",
    "Pipeline",
    "Probe",
    "ProgressTracker",
    "Scope",
    "Stream",
    "Worker",
    "accumulate",
]
