import numpy as np

from radialhj import RadialField, RadialGrid, RegularizedCoefficients, SteadyState, grid_epsilon, solve


def parabolic(amp=0.01):
    return lambda r: amp * (1 - r * r)


def bump(center=0.5, width=0.25, height=0.01):
    def f(r):
        z = (r - center) / width
        return height * np.where(np.abs(z) < 1, (1 - z * z) ** 2, 0.0)
    return f


def run(params, n, u0, t_end, outputs=20, epsilon=None, **kw):
    """Solve on an n-cell grid; ``u0`` is a callable of r or a SteadyState."""
    grid = RadialGrid(n)
    if isinstance(u0, SteadyState):
        field = RadialField(grid, u0.value(grid.nodes))
    else:
        field = RadialField.from_function(grid, u0)
    eps = grid_epsilon(n, params.q) if epsilon is None else epsilon
    times = np.linspace(0, t_end, outputs + 1)[1:]
    return solve(field, RegularizedCoefficients(eps, params), t_end, times, **kw)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
