#include "kstar/laplace.hpp"

#include "json.hpp"
#include "kstar/rational_json.hpp"

namespace kstar {

CRational vacuum_D(const Context& ctx)
{
    LaplaceEngine<CRational> eng(ctx, 2);
    return eng.operator_series(0).at(2, Key(0), Key(0));
}

std::string operator_series_json(const OperatorSeries<CRational>& op, const SeriesHeader& header)
{
    using J = nlohmann::ordered_json;
    J out;
    out["model"] = header.model;
    J pt = J::array();
    for (auto& c : header.point)
        pt.push_back({rational_json(c.re()), rational_json(c.im())});
    out["point"] = pt;
    out["K"] = header.K;
    out["engine"] = header.engine;
    out["n"] = op.n;
    out["series"] = J::array();
    for (int k = 0; k <= op.K; ++k) {
        J block;
        block["k"] = k;
        block["terms"] = J::array();
        for (auto& [ji, c] : op.C[k]) {
            J t;
            t["J"] = mono::unpack(ji.first, op.n);
            t["I"] = mono::unpack(ji.second, op.n);
            put_crational(t, c);
            block["terms"].push_back(t);
        }
        out["series"].push_back(block);
    }
    return out.dump(1);
}

OperatorSeries<CRational> operator_series_from_json(const std::string& text, SeriesHeader* header)
{
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    int K = j.at("K").get<int>();
    OperatorSeries<CRational> op(n, K);
    for (const auto& block : j.at("series")) {
        int k = block.at("k").get<int>();
        if (k < 0 || k > K)
            throw std::invalid_argument("operator table block k=" + std::to_string(k) + " outside 0.." +
                                        std::to_string(K));
        for (const auto& t : block.at("terms")) {
            MultiIndex Jm = t.at("J").get<MultiIndex>(), Im = t.at("I").get<MultiIndex>();
            if ((int)Jm.size() != n || (int)Im.size() != n)
                throw std::invalid_argument("operator table multi-index has wrong length");
            op.add(k, mono::pack(Jm), mono::pack(Im), json_crational(t));
        }
    }
    if (header) {
        header->model = j.value("model", "");
        header->K = K;
        header->engine = j.value("engine", "");
        header->point.clear();
        for (const auto& c : j.at("point"))
            header->point.emplace_back(json_rational(c[0]), json_rational(c[1]));
    }
    return op;
}

}  // namespace kstar
