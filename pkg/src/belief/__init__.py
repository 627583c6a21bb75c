"""Pearl's and Jeffrey's update rules on finite discrete models, computed exactly."""

from .channels import (
    Channel,
    compose,
    dagger,
    identity,
    jeffrey_update,
    pearl_update,
    pearl_update_iterated,
    pearl_update_repeated,
    power_channel,
    pull,
    push,
    single_pearl_update,
    tensor_channel,
)
from .core import (
    Distribution,
    Multiset,
    Predicate,
    Space,
    acc,
    coef,
    conjoin,
    flrn,
    kl_divergence,
    point_predicate,
    power,
    tensor,
    uniform_draw,
    update,
    validity,
)
from .errors import (
    BeliefError,
    DomainError,
    EmptyMultiset,
    InfiniteDivergence,
    ModelValidationError,
    ResourceLimit,
    ZeroAccepted,
    ZeroValidity,
)
from .models import Model, club_model, disease_model, load_model, parse_model
from .multisets import (
    arr,
    dagger_commutation_check,
    ext_channel,
    flrn_push,
    jeffrey_likelihood,
    multinomial,
    multinomial_update,
    multisets,
    pearl_likelihood,
    variational_fit,
)
from .ppl import (
    Infer,
    Program,
    ProgramBuilder,
    SamplerConfig,
    SamplerReport,
    build_progs,
    infer_enumerate,
    infer_reject,
    simulate_jeffrey_policy,
    simulate_pearl_policy,
)

__version__ = "0.1.0"
