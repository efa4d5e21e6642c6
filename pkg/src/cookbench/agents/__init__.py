from .bc import BCHyper, action_agreement, bc_fit, dataset_from_logs, select_split
from .policy import ARCH_VARIANTS, ArchVariant, PolicyParams, act, forward_batch, init_policy, param_length
from .scripted import ScriptedPolicy, UnreachableStation, scripted_demonstrator
from .spec import METHODS, AgentSpec
from .actors import Actor, PolicyActor, ScriptedActor, make_actor

__all__ = [
    "ARCH_VARIANTS",
    "Actor",
    "AgentSpec",
    "ArchVariant",
    "BCHyper",
    "METHODS",
    "PolicyActor",
    "PolicyParams",
    "ScriptedActor",
    "ScriptedPolicy",
    "UnreachableStation",
    "act",
    "action_agreement",
    "bc_fit",
    "dataset_from_logs",
    "forward_batch",
    "init_policy",
    "make_actor",
    "param_length",
    "scripted_demonstrator",
    "select_split",
]
