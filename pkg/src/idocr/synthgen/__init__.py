"""
Synthetic character generator and the pseudo-real field renderer.
"""

from .charset import CHARSET, CLASS_SETS, NUM_CLASSES, Charset
from .corpus import (
    CorpusSpec,
    FieldRecord,
    ManifestEntry,
    generate_corpus,
    generate_field_corpus,
    load_field_corpus,
    load_manifest,
    regenerate_sample,
    write_field_records,
)
from .fields import FIELD_KINDS, available_kinds, sample_field, sample_field_text
from .fonts import FontPool, assert_disjoint, load_font_pools
from .generator import CharSample, SyntheticGenerator, TextFieldSample
from .params import GenParams
from .rng import derive_seed, make_rng, rng_for

__all__ = [
    "CHARSET",
    "CLASS_SETS",
    "NUM_CLASSES",
    "Charset",
    "CorpusSpec",
    "FieldRecord",
    "ManifestEntry",
    "generate_corpus",
    "generate_field_corpus",
    "load_field_corpus",
    "load_manifest",
    "regenerate_sample",
    "write_field_records",
    "FIELD_KINDS",
    "available_kinds",
    "sample_field",
    "sample_field_text",
    "FontPool",
    "assert_disjoint",
    "load_font_pools",
    "CharSample",
    "SyntheticGenerator",
    "TextFieldSample",
    "GenParams",
    "derive_seed",
    "make_rng",
    "rng_for",
]
