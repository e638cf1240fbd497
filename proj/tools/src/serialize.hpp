#pragma once

#include <hbl/decay.hpp>
#include <hbl/dissipativity.hpp>
#include <hbl/sim.hpp>
#include <hbl/spectral.hpp>

#include <json.hpp>

namespace hbl::cli {

using json = nlohmann::json;

json to_json(cplx z);
json to_json(const Vec& v);
json to_json(const ConditionReport& r);
json to_json(const JinXinReport& r);
json to_json(const DecayCertificate& c);  // without the envelope samples
json to_json(const AsymptoticExpansion& e);
json to_json(const DecayFit& f);
json to_json(const SemigroupDecay& s);
json to_json(const BlockSymmetrizerResult& s);

}  // namespace hbl::cli
