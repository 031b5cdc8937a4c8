"""HTTP shim exposing /embed and /generate for the question-generation pipeline.

Model identifiers select the implementation: "hash:<dim>" and "template"
are deterministic built-ins that need no downloads; any other identifier
is loaded through sentence-transformers (embeddings) or transformers
(seq2seq generation).
"""

__version__ = "0.1.0"

from modelshim.config import ShimConfig
from modelshim.app import create_app

__all__ = ["ShimConfig", "create_app"]
