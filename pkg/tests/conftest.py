import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fluxchain.lattice import ChainSpec

# device values: M = 26 cells, L_r = 2.80 nH, C_g = 249.15 fF, C_c = 202.70 fF,
# fluxonium E_J/h = 8.17, E_C/h = 3.30, E_L/h = 5.55 GHz, coupler 4 SQUIDs
# with L_c tunable over 4-14 nH.

DEVICE_CHAIN = dict(num_cells=26, l_r=2.80e-9, c_g=249.15e-15, c_c=202.70e-15)
DEVICE_FLUXONIUM = dict(e_j=8.17, e_c=3.30, e_l=5.55)


@pytest.fixture
def device_chain_spec():
    return ChainSpec(**DEVICE_CHAIN)
