"""Explicit cover-free families, their sub-designs, and exhaustive verifiers."""

__version__ = "0.1.0"

from .errors import CapacityError, InvalidParams, VerificationFailed  # noqa: E402
from .family import (BitFamily, Composed, FnFamily, Identity, Table,  # noqa: E402
                     from_descriptor, read_fn_family, tree_size, write_fn_family)
from .core import (DesignParams, Verdict, Witness, complement_family,  # noqa: E402
                   read_matrix, restrict_columns, verify_cff, write_matrix)
from .hashing import (build_dense_shf, build_perfect_hash_compress,  # noqa: E402
                      build_perfect_hash_quadratic, build_phf, compose_families,
                      shf_min_density, verify_phf)
from .splitters import (appendixA_report, build_splitter, build_splitter_base,  # noqa: E402
                        splitter_params, verify_splitter)
from .rectangles import PointSet, build_hitting_set, verify_hitting_set  # noqa: E402
from .construct import (MultiCffSpec, SizeReport, build_base_cff, build_cff,  # noqa: E402
                        build_cff_construction1, build_cff_construction2, build_mcff,
                        enumerate_compositions, size_report, verify_mcff)
from .grouptest import PoolingDesign, decode, design_tests, round_trip, simulate  # noqa: E402
from .separators import (build_min_separating, lift_to_multiset_separator,  # noqa: E402
                         verify_min_separating, verify_multiset_separator)

__all__ = [name for name in dir() if not name.startswith("_")]
