#pragma once

#include <string>

#include "json.hpp"
#include "kstar/scalar.hpp"

namespace kstar {

// Integers are written as JSON numbers when they fit in 64 bits, otherwise as
// decimal strings; readers accept both, plus "p/q" strings.
template <class Json = nlohmann::ordered_json>
Json integer_json(const mpz_class& z)
{
    if (z.fits_slong_p())
        return Json(z.get_si());
    return Json(z.get_str());
}

template <class Json>
mpz_class json_integer(const Json& j)
{
    if (j.is_number_integer())
        return mpz_class(j.template get<long>());
    if (j.is_string())
        return mpz_class(j.template get<std::string>());
    throw std::invalid_argument("expected an integer, got " + j.dump());
}

template <class Json = nlohmann::ordered_json>
Json rational_json(const Rat& q)
{
    if (q.get_den() == 1)
        return integer_json<Json>(q.get_num());
    return Json(q.get_str());
}

template <class Json>
Rat json_rational(const Json& j)
{
    if (j.is_number_integer())
        return Rat(j.template get<long>());
    if (j.is_string())
        return parse_rational(j.template get<std::string>());
    throw std::invalid_argument("expected an exact rational, got " + j.dump());
}

template <class Json>
void put_crational(Json& j, const CRational& c)
{
    j["re_num"] = integer_json<Json>(c.re().get_num());
    j["re_den"] = integer_json<Json>(c.re().get_den());
    j["im_num"] = integer_json<Json>(c.im().get_num());
    j["im_den"] = integer_json<Json>(c.im().get_den());
}

template <class Json>
CRational json_crational(const Json& j)
{
    auto part = [&](const char* num, const char* den) {
        mpz_class a = j.contains(num) ? json_integer(j[num]) : mpz_class(0);
        mpz_class b = j.contains(den) ? json_integer(j[den]) : mpz_class(1);
        if (b == 0)
            throw std::invalid_argument("zero denominator in " + j.dump());
        Rat q(a, b);
        q.canonicalize();
        return q;
    };
    return CRational(part("re_num", "re_den"), part("im_num", "im_den"));
}

}  // namespace kstar
