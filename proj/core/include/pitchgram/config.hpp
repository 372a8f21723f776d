#pragma once

#include <string>

#include "pitchgram/pitchgram.hpp"
#include "pitchgram/transcriber.hpp"

namespace pitchgram {

/// Everything the tools can be configured with, in one place.
struct ToolConfig {
  AnalysisConfig analysis;
  TranscriberConfig transcriber;
  Domain domain = Domain::Frequency;
  PitchgramVariant variant = PitchgramVariant::PowerWeighted;

  void validate() const {
    analysis.validate();
    transcriber.validate();
  }
};

/// Parses the line-oriented `key = value` config format with [sections].
/// Unknown keys and malformed values raise errors naming the offender.
ToolConfig parse_config(const std::string& text);
ToolConfig load_config(const std::string& path);

/// The shipped defaults, rendered in config file syntax.
std::string default_config_text();

}  // namespace pitchgram
