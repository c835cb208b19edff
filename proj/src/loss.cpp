#include "adcg/loss.hpp"

namespace adcg {

double squared_loss_value(const Vector& r) { return 0.5 * r.squaredNorm(); }

Vector squared_loss_gradient(const Vector& r) { return r; }

}  // namespace adcg
