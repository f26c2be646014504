#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

//! Angular-momentum algebra: 3j symbols, Legendre functions, Wigner D.
/*!
  Conventions used everywhere in the library:
  - D^j_{m'm}(a,b,g) = exp(-i m' a) d^j_{m'm}(b) exp(-i m g), the active
    rotation R = Rz(a) Ry(b) Rz(g) taking molecular to lab coordinates.
  - P^M_L carries the Condon-Shortley phase, so P^1_2(x) = -3 x sqrt(1-x^2)
    and Y_LM = N_LM P^M_L(cos t) exp(i M p).
*/
namespace pecd::angular {

//! 3j arguments, every entry doubled (2j, 2m), so half-integers are exact.
struct AngularKey {
  int j1, j2, j3, m1, m2, m3;
};

//! Key for integer quantum numbers.
AngularKey int_key(int j1, int j2, int j3, int m1, int m2, int m3);

//! All selection rules (parity of doubled values, |m|<=j, triangle, sum m).
bool selection_ok(const AngularKey &k);

//! Regge-canonical form: 'code' identifies the orbit of the 72 symmetries,
//! 'sign' maps the canonical value back to this key.
struct Canonical {
  std::uint64_t code;
  int sign;
  AngularKey key;
};
Canonical canonicalize(const AngularKey &k);

//! Uncached evaluation. Exact rational arithmetic up to j = 60, log-factorial
//! floating evaluation above.
double wigner3j_uncached(const AngularKey &k);

//! Memoized table; concurrent readers, one writer at a time.
class Wigner3jCache {
public:
  double get(const AngularKey &k);
  std::size_t size() const;
  void clear();

private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, double> table_;
};

Wigner3jCache &global_cache();

//! Cached 3j (goes through global_cache()).
double wigner3j(const AngularKey &k);
//! Integer-j convenience form.
double w3j(int j1, int j2, int j3, int m1, int m2, int m3);

//! Exact factorial as double (n <= 170).
double factorial(int n);

double assoc_legendre(int L, int M, double x);

double wigner_small_d(int j, int mp, int m, double beta);
std::complex<double> wigner_D(int j, int mp, int m, double a, double b,
                              double g);
std::complex<double> spherical_harmonic(int l, int m, double theta,
                                        double phi);

//! (1/8pi^2) * integral of D^{l1}_{m1 m1'} D^{l2}_{m2 m2'} D^{l3}_{m3 m3'};
//! each row is (l, m, m').
double euler_triple_integral(const std::array<std::array<int, 3>, 3> &rows);

struct DTerm {
  int l;
  double coefficient;
};
//! D^{l1}_{m1 m1'} D^{l2}_{m2 m2'} = sum_l c_l D^{l*}_{-m12,-m12'}.
//! Exact zeros are dropped.
std::vector<DTerm> d_product_expand(int l1, int m1, int m1p, int l2, int m2,
                                    int m2p);

//! Coefficient of P^M_L(cos t) exp(i M p) in Y_lm Y*_l'm' (common frame).
double lab_frame_coupling(int l, int m, int lp, int mp, int L, int M);

//! zeta^{L,M}_{l,l'} prefactor.
double zeta_prefactor(int l, int lp, int L, int M);

//! Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w);

} // namespace pecd::angular
