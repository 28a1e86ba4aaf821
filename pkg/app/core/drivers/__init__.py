from .block import solve_block, uniform_composition
from .iteration import derive_seed
from .rhombus import rhombus_bits, solve_rhombus
from .square import solve_square

__all__ = ["derive_seed", "rhombus_bits", "solve_block", "solve_rhombus", "solve_square", "uniform_composition"]
