"""Exact free-field computations for the W_N algebra and its q-deformation.

Submodules:

* ``coeff``     -- rational-function fields and truncated series
* ``symfun``    -- partitions, Macdonald/Jack/Schur symmetric-function oracles
* ``fock``      -- deformed Heisenberg algebras and graded Fock modules
* ``currents``  -- vertex factors, (q-)Miura currents, mode matrices
* ``relations`` -- quadratic-relation and Virasoro verification
* ``singular``  -- singular vectors, screening integrals, oracle comparison
* ``climit``    -- the q -> 1 limit and the N=2,3 consistency identities
* ``cli``       -- command-line front end
"""

__version__ = "0.1.0"
