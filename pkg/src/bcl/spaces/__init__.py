from .build import build_space, dual_space, koethe_dual, norm, random_polyhedral
from .calderon import CalderonSpace
from .normed import (
    DirectSumSpace,
    DualSpace,
    GaugeSpace,
    LpSpace,
    NormedSpace,
    PolyhedralSpace,
    Subspace,
    VectorSumSpace,
    conjugate,
)
from .spec import (
    INF,
    SpaceSpec,
    SpecError,
    calderon,
    describe,
    direct_sum,
    from_dict,
    load_spec,
    lp,
    polyhedral,
    pullback,
    subspace,
    to_dict,
    twisted_kp,
    vector_sum,
    weighted_lp,
)
from .twisted import PullbackSpace, TailSpace, TwistedKPSpace, kalton_peck_omega, pullback_pair
