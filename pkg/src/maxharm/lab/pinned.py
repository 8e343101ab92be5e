"""Regression constants frozen from the first full run of the shipped config.

Keys are ``<quantity>@<grid size>``.  Values were produced by
``maxharm verify --print-values`` and copied here verbatim; criteria compare
against them at 1e-6 relative (``C_iso`` is an upper bound).
"""

PINNED: dict[str, float] = {
    'locest_max@64': 0.5761078572214621,
    'locest_max@128': 0.5695007013397156,
    'C_iso@64': 0.9927212248499927,
    'hardy_max@64': 0.8903214794518117,
    'hardy_max@128': 0.9185740833681265,
    'llogl_link0_max@64': 0.3845263734730873,
    'llogl_link0_max@128': 0.35911365218075986,
    'llogl_link1_max@64': 0.862762146638683,
    'llogl_link1_max@128': 0.9070447306042506,
}
