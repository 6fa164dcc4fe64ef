"""Lattices, distances and the local Pauli strings the feature map is built on.

Run: python demos/01_lattice_and_paulis.py
"""
from groundlearn.geometry import GeoRange, Lattice, enumerate_geo_paulis, obs_distance, qubit_distance
from groundlearn.pauli import PauliString, PauliSum

lat = Lattice((2, 3))
print(f"a {lat.sides} lattice has {lat.n} qubits, {len(lat.edges())} nearest-neighbour edges "
      f"and diameter {lat.diameter()}")
print("edges:", lat.edges())

# Distances are l1 on the grid; between observables it is the closest pair of sites.
print("d(0, 5) =", qubit_distance(lat, 0, 5))
print("d({0,1}, {4,5}) =", obs_distance(lat, (0, 1), (4, 5)))

# Every Pauli string whose support fits in a 2 x 2 box.
strings = enumerate_geo_paulis(lat, GeoRange((2, 2)))
print(f"{len(strings)} local strings, for example {[P.label() for P in strings[:5]]}")

# Strings are sparse site -> letter maps; sums merge like terms.
O = PauliSum({PauliString.parse("X0 X1"): 0.5, PauliString.parse("Z2"): -1.0})
O = O + PauliSum({PauliString.parse("X0 X1"): 0.25})
print("O =", {P.label(): a for P, a in O})
