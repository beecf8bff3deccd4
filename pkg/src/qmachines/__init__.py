"""Quantum finite automata with classical states and dcq Turing machines."""
from .errors import QMachinesError
from .linalg import ProjectiveMeasurement, StateVector, UnitaryOperator
from .dfa import Dfa, dfa_run, minimize_dfa, nerode_classes
from .qfa import (KLetterQfa, LiftedQfac, Mm1Qfa, Mo1Qfa, Qfac, QfaCL, kletter_accept_prob,
                  lift_qfac, lifted_outcome_prob, mm_run, mo_accept_prob, qfac_accept_prob,
                  qfac_outcome_prob, qfacl_accept_prob)
from .constructions import (build_divisibility_mo, build_l0m_qfac, compose_setop,
                            dfa_to_qfac)
from .complexity import audit_lower_bound, sphere_packing_bound
from .dcq import DcqMachine, Transition, dcq_decide, dcq_init, dcq_run, dcq_step
from .smn import (encode_machine, smn_translate, universal_emulate, universality_program,
                  wrap_for_universality)

__version__ = "0.1.0"
