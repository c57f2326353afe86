"""Regenerate h2_sto3g.json: minimal-basis H2 integrals over a bond-length grid.

Requires pyscf. Spin-orbitals are interleaved (1a, 1b, 2a, 2b) where 1 is the
bonding and 2 the anti-bonding RHF molecular orbital. two_body holds physicist
integrals <pq|rs> = int phi_p*(1) phi_q*(2) phi_r(1) phi_s(2) / r12.
"""
import json
import sys

import numpy as np
from pyscf import ao2mo, gto, scf

BOND_LENGTHS = [0.3, 0.4, 0.5, 0.6, 0.7, 0.74, 0.8, 0.9, 1.0, 1.25, 1.75, 2.5]


def geometry(r):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])  # chemist (ij|kl)
    n = 2 * c.shape[1]
    one = np.zeros((n, n))
    two = np.zeros((n, n, n, n))
    for p in range(n):
        for q in range(n):
            if p % 2 == q % 2:
                one[p, q] = h1[p // 2, q // 2]
            for t in range(n):
                for s in range(n):
                    if p % 2 == t % 2 and q % 2 == s % 2:
                        two[p, q, t, s] = eri[p // 2, t // 2, q // 2, s // 2]
    clean = lambda a: np.where(np.abs(a) < 1e-14, 0.0, a).tolist()
    return {
        "bond_length": r,
        "nuclear_repulsion": mol.energy_nuc(),
        "n_spin_orbitals": n,
        "n_electrons": 2,
        "hartree_fock_energy": mf.e_tot,
        "one_body": clean(one),
        "two_body": clean(two),
    }


def main(path):
    doc = {
        "description": "H2 minimal-basis (STO-3G) integrals in the RHF molecular-orbital basis",
        "generator": "pyscf " + __import__("pyscf").__version__ + " via generate_h2.py",
        "units": {"bond_length": "angstrom", "energy": "hartree"},
        "spin_orbital_order": ["1a", "1b", "2a", "2b"],
        "two_body_convention": "physicist <pq|rs>; H = E_nuc + sum h_pq a+_p a_q + 1/2 sum <pq|rs> a+_p a+_q a_s a_r",
        "geometries": [geometry(r) for r in BOND_LENGTHS],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "h2_sto3g.json")
