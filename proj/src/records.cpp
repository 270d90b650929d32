#include "oemsync/records.hpp"

namespace oemsync {

void ObservableSeries::reserve(std::size_t n) {
  for (auto* v : {&times, &sx, &sy, &sz, &q, &p, &re_a, &im_a, &n_cav, &n_mech}) v->reserve(n);
}

void ObservableSeries::push(double t, const Sample& s) {
  times.push_back(t);
  sx.push_back(s.sx);
  sy.push_back(s.sy);
  sz.push_back(s.sz);
  q.push_back(s.q);
  p.push_back(s.p);
  re_a.push_back(s.re_a);
  im_a.push_back(s.im_a);
  n_cav.push_back(s.n_cav);
  n_mech.push_back(s.n_mech);
}

Sample ObservableSeries::at(std::size_t k) const {
  return {sx[k], sy[k], sz[k], q[k], p[k], re_a[k], im_a[k], n_cav[k], n_mech[k]};
}

namespace {

template <class State>
Sample measure_impl(const ObservableSet& o, const State& s) {
  Sample out;
  out.sx = expect(o.sx, s).real();
  out.sy = expect(o.sy, s).real();
  out.sz = expect(o.sz, s).real();
  const Complex b = expect(o.b, s);
  out.q = 2.0 * b.real();
  out.p = 2.0 * b.imag();
  const Complex a = expect(o.a, s);
  out.re_a = a.real();
  out.im_a = a.imag();
  out.n_cav = expect(o.na, s).real();
  out.n_mech = expect(o.nb, s).real();
  return out;
}

}  // namespace

Sample measure(const ObservableSet& obs, const Vector& psi) { return measure_impl(obs, psi); }
Sample measure(const ObservableSet& obs, const DenseMatrix& rho) { return measure_impl(obs, rho); }

std::string to_string(Branch b) {
  switch (b) {
    case Branch::blue: return "blue";
    case Branch::red: return "red";
    case Branch::transit: return "transit";
  }
  return "transit";
}

}  // namespace oemsync
