from __future__ import annotations

from ctxparse.core.transforms.ambiguation_config import AmbiguationConfig
from ctxparse.core.transforms.ambiguation_config import AmbiguationConfigError
from ctxparse.core.transforms.ambiguator import Ambiguator
from ctxparse.core.transforms.ambiguator import ambiguate
from ctxparse.core.transforms.concept_wrapper import ConceptWrapper
from ctxparse.core.transforms.concept_wrapper import WrapperStripper
from ctxparse.core.transforms.concept_wrapper import wrap_concepts
from ctxparse.core.transforms.tree_transform import TreeTransform
from ctxparse.core.transforms.type_compressor import MalformedHolTree
from ctxparse.core.transforms.type_compressor import TypeCompressor
from ctxparse.core.transforms.type_compressor import compress_types

__all__ = [
    "AmbiguationConfig",
    "AmbiguationConfigError",
    "Ambiguator",
    "ConceptWrapper",
    "MalformedHolTree",
    "TreeTransform",
    "TypeCompressor",
    "WrapperStripper",
    "ambiguate",
    "compress_types",
    "wrap_concepts",
]
