"""Smoke test for the weylbound extension module."""

import weylbound as wb

fam = wb.MatrixFamily.spin1_scaled()
assert fam.n == 3 and fam.arity == 3 and fam.symmetry == "hermitian"

res = wb.count_cwp(fam)
assert res["total"] == 6, res
print("count_cwp:", res["total"], res["basis"])

pert = fam.perturb(wb.MatrixFamily.spin1_perturbation(1))
real = wb.find_real_weyl_points(pert, 0.1)
cplx = wb.find_complex_weyl_points(pert, 0.1)
assert len(real["points"]) == 4 and len(cplx["points"]) == 6
assert wb.parity_consistent(4, 6)
print("weyl points:", len(real["points"]), "real,", len(cplx["points"]), "complex")

rep = wb.chern_numbers(wb.MatrixFamily.spin(2), grid=16)
assert rep["cherns"] == [-2, 0, 2], rep["cherns"]
bound, _ = wb.lower_bound_from_cherns(rep["cherns"])
print("cherns:", rep["cherns"], "bound", bound)

assert wb.multiplicity_formula(4) == 20
assert wb.hilbert_sequence(4) == [1, 4, 10, 4, 1]

m = wb.MatrixFamily([["x", "y - i*z"], ["y + i*z", "-x"]])
assert m.evaluate([0.1, 0.0, 0.0])[0][0] == 0.1
assert wb.count_cwp(m)["total"] == wb.multiplicity_formula(2) == 1

try:
    wb.MatrixFamily([["x", "y"], ["z", "x"]])
except ValueError as e:
    print("rejected:", e)
else:
    raise AssertionError("non-hermitian rows accepted")

print("ok", wb.__version__)
