"""Generate WSDL contracts, XML Schemas and variability specification files from
variability-aware service models, and resolve variant selections against them."""
from .diagnostics import (BundleLoadError, CrossReferenceError, Finding, ModelParseError,
                          SelectionError, TransformError, UnknownPrimitiveError,
                          UnknownSelectionError, UnresolvedReferenceError, ValidationReport,
                          VarwsdlError)
from .emitter import (ArtifactBundle, emit_variability, emit_wsdl, emit_xsd, write_bundle,
                      write_resolved)
from .pim import PimModel, parse_pim, serialize_pim, validate_pim
from .psm import PsmModel, load_bundle, validate_psm
from .resolver import ResolutionReport, Selection, resolve, validate_selection
from .transform import transform_interface, transform_model

__all__ = [
    "ArtifactBundle", "BundleLoadError", "CrossReferenceError", "Finding", "ModelParseError",
    "PimModel", "PsmModel", "ResolutionReport", "Selection", "SelectionError", "TransformError",
    "UnknownPrimitiveError", "UnknownSelectionError", "UnresolvedReferenceError",
    "ValidationReport", "VarwsdlError", "emit_variability", "emit_wsdl", "emit_xsd",
    "load_bundle", "parse_pim", "resolve", "serialize_pim", "transform_interface",
    "transform_model", "validate_pim", "validate_psm", "validate_selection", "write_bundle",
    "write_resolved",
]
