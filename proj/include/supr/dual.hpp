/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/dual.hpp
 *
 * Copyright 2026 The supr authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <ostream>

namespace supr {

/**
 * Forward-mode automatic differentiation scalar with a single tangent lane.
 *
 * A Dual carries a value v and the directional derivative d of v with respect
 * to one chosen input direction. Running a templated computation once per
 * direction yields exact Jacobian-vector products; no numerical step size is
 * involved. Comparisons look at the value only, so branches taken by a Dual
 * computation match the plain double computation at the same point.
 */
struct Dual
{
    double v = 0.0; ///< value
    double d = 0.0; ///< tangent (directional derivative)

    Dual() = default;
    Dual(double value) : v(value), d(0.0) {} // NOLINT: implicit by design, mirrors double
    Dual(double value, double tangent) : v(value), d(tangent) {}

    Dual& operator+=(const Dual& r)
    {
        v += r.v;
        d += r.d;
        return *this;
    }
    Dual& operator-=(const Dual& r)
    {
        v -= r.v;
        d -= r.d;
        return *this;
    }
    Dual& operator*=(const Dual& r)
    {
        d = d * r.v + v * r.d;
        v *= r.v;
        return *this;
    }
    Dual& operator/=(const Dual& r)
    {
        d = (d * r.v - v * r.d) / (r.v * r.v);
        v /= r.v;
        return *this;
    }

    Dual operator-() const { return Dual(-v, -d); }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }

inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }
inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }

inline Dual sqrt(const Dual& a)
{
    const double s = std::sqrt(a.v);
    return Dual(s, a.d / (2.0 * s));
}
inline Dual sin(const Dual& a) { return Dual(std::sin(a.v), a.d * std::cos(a.v)); }
inline Dual cos(const Dual& a) { return Dual(std::cos(a.v), -a.d * std::sin(a.v)); }
inline Dual exp(const Dual& a)
{
    const double e = std::exp(a.v);
    return Dual(e, a.d * e);
}
inline Dual log(const Dual& a) { return Dual(std::log(a.v), a.d / a.v); }
inline Dual abs(const Dual& a) { return a.v < 0.0 ? -a : a; }
inline Dual atan2(const Dual& y, const Dual& x)
{
    const double n = x.v * x.v + y.v * y.v;
    return Dual(std::atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / n);
}
inline Dual pow(const Dual& a, double p)
{
    const double f = std::pow(a.v, p);
    return Dual(f, p * std::pow(a.v, p - 1.0) * a.d);
}

inline bool isfinite(const Dual& a) { return std::isfinite(a.v) && std::isfinite(a.d); }

inline std::ostream& operator<<(std::ostream& os, const Dual& a)
{
    return os << a.v << "+" << a.d << "e";
}

/// Value of a scalar, usable in code templated over double and Dual.
inline double value(double s) { return s; }
inline double value(const Dual& s) { return s.v; }

/// Tangent of a scalar (zero for plain doubles).
inline double tangent(double) { return 0.0; }
inline double tangent(const Dual& s) { return s.d; }

} // namespace supr

namespace Eigen {

template <>
struct NumTraits<supr::Dual> : NumTraits<double>
{
    typedef supr::Dual Real;
    typedef supr::Dual NonInteger;
    typedef supr::Dual Nested;
    typedef supr::Dual Literal;

    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 2,
        MulCost = 4,
    };
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<supr::Dual, double, BinaryOp>
{
    typedef supr::Dual ReturnType;
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, supr::Dual, BinaryOp>
{
    typedef supr::Dual ReturnType;
};

} // namespace Eigen
