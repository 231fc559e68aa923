"""Exact GDoF calculations for K-user interference and broadcast networks."""

from .bc import (BcBoundReport, RatioReport, bc_cycle_bound, bc_partition_bound,
                 bc_sum_upper, iterative_bound, ratio_report)
from .cycles import (Cycle, CyclicPartition, combine, cycle_delta, enumerate_cycles,
                     enumerate_partitions, merge_trivial, parse_cycle, parse_partition, weight)
from .errors import (CapExceeded, CycleError, GdofError, IndexRangeError, InfeasibleError,
                     NetworkFormatError, RegimeError, SchemeError)
from .generators import (TreeSpec, ctin_cyclic_network, fig1_network, half_cross_network,
                         random_in_regime, symmetric_network, tree_network)
from .network import (ChannelMatrix, RegimeReport, Violation, classify, delta,
                      format_rational, parse_network, parse_rational)
from .schemes import (LayeredScheme, Message, SchemeVerdict, ctin_bc_scheme,
                      symmetric_bc_scheme, tree_bc_scheme, verify_scheme)
from .tin import (DualCertificate, GdofPoint, PtinResult, TinaResult, ptin_check, ptin_sum,
                  ptin_sum_oracle, tina_sum, tina_sum_oracle)

__version__ = "0.1.0"
