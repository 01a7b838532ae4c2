# Turaev-Viro invariants of closed 3-manifold triangulations
