#pragma once

#include <json.hpp>

#include <string>

#include "charseq/certificate.hpp"
#include "charseq/dsum.hpp"
#include "charseq/metric.hpp"
#include "charseq/oracle.hpp"
#include "charseq/prufer.hpp"
#include "charseq/refute.hpp"
#include "charseq/torus.hpp"

// JSON and CSV codecs for every type that crosses the command-line boundary.
// Structures round-trip exactly; verdicts are write-only. Rationals travel as
// "num/den" strings, integers as JSON numbers when they fit and as decimal
// strings otherwise.
namespace charseq::io {

using nlohmann::json;

mpq_class parse_rational(const std::string& s);
std::string rational_str(const mpq_class& q);
std::string rational_str(const UnitRational& x);

json integer_json(const mpz_class& z);
mpz_class parse_integer(const json& j);

json digits_json(const prufer::PadicDigits& w);
prufer::PadicDigits parse_digits(const json& j);

json tseq_json(const prufer::TSequence& t);
prufer::TSequence parse_tseq(const json& j);

json orders_json(const dsum::OrderSequence& b);
dsum::OrderSequence parse_orders(const json& j);

json ds_stream_json(const dsum::DSStream& w);
dsum::DSStream parse_ds_stream(const json& j);

json interval_json(const CertifiedReal& c);
json certificate_json(const MetricCertificate& c);

json membership_json(const prufer::MembershipVerdict& v);
json ds_membership_json(const dsum::DSMembershipVerdict& v);
json approximation_json(const prufer::GeneratorApproximation& a);
json dense_json(const dsum::DenseApproximation& a);
json refutation_json(const prufer::RefutationResult& r);
json ds_refutation_json(const dsum::DSRefutation& r);
json report_json(const oracle::EquivalenceReport& r);
json decay_json(const oracle::DecayTable& t);

std::string decay_csv(const oracle::DecayTable& t);

}  // namespace charseq::io
