// Line-oriented transcript format:
//
//   # cvqsdc transcript
//   variant=asymmetric          (every protocol setting, one per line)
//   ...
//   index,label,alpha_re,alpha_im,theta,m_true,alice_meas,bob_meas,eve_fwd_meas,eve_bwd_meas,m_est
//   0,decoy,3.1,0,0,NA,NA,0.27,0.9,0.01,NA
//   ...
//   verdict=accepted            (or verdict=aborted:<reason>)
//
// Numbers are written in shortest round-trip form, so reading a transcript
// back and writing it again gives identical bytes.
#pragma once

#include "cvqsdc/protocol.hpp"

#include <iosfwd>

namespace cvqsdc {

void write_transcript(std::ostream& out, const Transcript& transcript);
/// Throws std::invalid_argument with a line number on malformed input.
Transcript read_transcript(std::istream& in);

}  // namespace cvqsdc
