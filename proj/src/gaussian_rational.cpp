#include "sdq/gaussian_rational.hpp"

#include <stdexcept>

namespace sdq {

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    Rational norm = o.re_ * o.re_ + o.im_ * o.im_;
    *this *= o.conj();
    re_ /= norm;
    im_ /= norm;
    return *this;
}

std::string GaussianRational::to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    if (sgn(re_) == 0) return "(" + im_.get_str() + ")i";
    return "(" + re_.get_str() + (sgn(im_) > 0 ? "+" : "-") + Rational(abs(im_)).get_str() + "i)";
}

std::string rational_to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    for (char c : s) {
        if (c == '.' || c == 'e' || c == 'E') {
            throw std::invalid_argument("decimal literal '" + s + "' on an exact path; write it as p/q");
        }
    }
    Rational r;
    if (r.set_str(s, 10) != 0 || sgn(r.get_den()) == 0) {
        throw std::invalid_argument("malformed rational literal '" + s + "'");
    }
    r.canonicalize();
    return r;
}

}  // namespace sdq
