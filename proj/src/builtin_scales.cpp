#include <string>

#include <json.hpp>

#include "epv/errors.hpp"
#include "epv/scale.hpp"

namespace epv {
namespace {

struct ItemRow {
  const char* label_key;
  const char* category;
  int epvr_max;  // illustrative grading, not the published instrument
  const char* guidance;
};

// Item wording condensed from the instrument's user guide (English
// translation). Order is item id 1..20.
constexpr ItemRow kItems[kItemCount] = {
    {"foreign_origin", "personal-data", 1,
     "Aggressor or victim originates from, or is a national of, a foreign country."},
    {"recent_separation", "relationship", 3,
     "Within the last 6 months the couple has entered a crisis leading to the end of cohabitation, "
     "separation proceedings, or a judicial separation or divorce decision."},
    {"recent_harassment", "relationship", 3,
     "Within the last 6 months: harassment of the victim (threatening calls, repeated messages, "
     "pressure through the children) or breach of a restraining order."},
    {"injurious_physical_violence", "violence-type", 2,
     "Non-accidental acts that cause or are likely to cause injury (pushing, hitting, burning, "
     "throwing objects), including use of objects capable of injuring."},
    {"violence_before_family", "violence-type", 2,
     "Physical violence carried out in front of the children or other relatives; the aggressor no "
     "longer holds back in their presence."},
    {"escalation_past_month", "violence-type", 3,
     "Two or more incidents in the past month with rising frequency and seriousness."},
    {"death_threats_past_month", "violence-type", 3,
     "Serious threats or threats to kill in the past month, credible enough to frighten the victim "
     "into submission."},
    {"weapon_threats", "violence-type", 3,
     "Threats made with a weapon or any object able to harm physical integrity."},
    {"intent_severe_injury", "violence-type", 3,
     "Conduct showing a clear intent to cause serious injury even when none resulted (blows to the "
     "head, choking, violent shoves, throwing the victim to the ground)."},
    {"sexual_aggression", "violence-type", 2,
     "Sexual acts within the relationship without the victim's consent, including coercion by "
     "intimidation."},
    {"jealousy_control", "perpetrator-profile", 3,
     "Very intense jealousy or controlling behaviour driven by fear of losing the partner."},
    {"prior_partner_violence", "perpetrator-profile", 2,
     "History of physical or psychological violence against previous partners."},
    {"violence_toward_others", "perpetrator-profile", 2,
     "Involvement, past or present, in violent incidents with family, social or work contacts."},
    {"substance_abuse", "perpetrator-profile", 2,
     "Current problematic use of alcohol or drugs that negatively affects behaviour toward the "
     "victim. Habitual or sporadic use without such effect does not count."},
    {"mental_illness_untreated", "perpetrator-profile", 2,
     "Psychiatric history together with evidence of abandoning treatment or prescribed medication."},
    {"cruelty_no_remorse", "perpetrator-profile", 3,
     "Ongoing contempt and humiliation toward the victim, cold and instrumental aggression, and no "
     "remorse."},
    {"justifies_violence", "perpetrator-profile", 1,
     "Denies, minimises or justifies the violence, blaming his own state or the victim's "
     "provocation."},
    {"victim_fears_death", "victim-vulnerability", 3,
     "In the past month the victim perceives a real danger of being killed or seriously assaulted; "
     "ask which facts support the perception."},
    {"withdraws_complaint", "victim-vulnerability", 2,
     "The victim wants proceedings dropped or reverses a decision to leave or report, out of fear "
     "of reprisal; check for other motives masking that fear."},
    {"victim_vulnerability", "victim-vulnerability", 3,
     "The victim is isolated with no one to turn to, or is physically, economically or emotionally "
     "dependent."},
};

std::string make_document(ScaleId id) {
  using nlohmann::ordered_json;
  const bool graded = id == ScaleId::EPV_R;
  ordered_json doc;
  doc["scale_id"] = std::string(to_string(id));
  doc["name"] = graded ? "EPV-R (illustrative graded weights)" : "EPV (binary items)";
  doc["illustrative"] = graded;
  doc["tier_bounds"] = {{"low_max", graded ? 9 : 4}, {"moderate_max", graded ? 23 : 9}};
  ordered_json items = ordered_json::array();
  for (int i = 0; i < kItemCount; ++i) {
    const ItemRow& row = kItems[i];
    items.push_back({{"id", i + 1},
                     {"label_key", row.label_key},
                     {"category", row.category},
                     {"max_points", graded ? row.epvr_max : 1},
                     {"guidance", row.guidance}});
  }
  doc["items"] = std::move(items);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string_view builtin_scale_document(ScaleId id) {
  static const std::string epv = make_document(ScaleId::EPV);
  static const std::string epvr = make_document(ScaleId::EPV_R);
  switch (id) {
    case ScaleId::EPV:
      return epv;
    case ScaleId::EPV_R:
      return epvr;
    case ScaleId::Custom:
      break;
  }
  throw ValidationError("unknown-scale", "no built-in document for a custom scale");
}

const ScaleDefinition& builtin_scale(ScaleId id) {
  static const ScaleDefinition epv = load_scale(builtin_scale_document(ScaleId::EPV));
  static const ScaleDefinition epvr = load_scale(builtin_scale_document(ScaleId::EPV_R));
  switch (id) {
    case ScaleId::EPV:
      return epv;
    case ScaleId::EPV_R:
      return epvr;
    case ScaleId::Custom:
      break;
  }
  throw ValidationError("unknown-scale", "no built-in definition for a custom scale");
}

}  // namespace epv
