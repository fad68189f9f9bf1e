//! Download log format.
//!
//! Everything little-endian. A stream is one 14-byte header followed by
//! fixed-size records of a single kind:
//!
//! ```text
//! header:    magic "AEFB" | version u8 (=1) | mode u8 (0 raw, 1 processed)
//!            | fs u16 | counts_per_g u16 | record_count u32
//! raw:       ax i16 | ay i16 | az i16                          (6 bytes)
//! processed: window_start_s u32 | resp_centihz u16
//!            | activity_micro_g u32                           (10 bytes)
//! ```
//!
//! Decoding tolerates a truncated tail — flash dumps stop wherever the
//! download died — by returning every complete record plus a truncation
//! flag. Anything else wrong with the bytes is a hard error.

use crate::signal::FULL_SCALE_G;
use crate::Window;

/// Stream magic.
pub const LOG_MAGIC: [u8; 4] = *b"AEFB";
/// Current format version.
pub const LOG_VERSION: u8 = 1;
/// Header size in bytes.
pub const HEADER_BYTES: usize = 14;
/// Raw record size in bytes.
pub const RAW_RECORD_BYTES: usize = 6;
/// Processed record size in bytes.
pub const PROCESSED_RECORD_BYTES: usize = 10;
/// Largest respiration value a processed record can carry, in centi-Hz.
pub const MAX_RESP_CENTIHZ: u16 = 800;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("bad magic (expected \"AEFB\")")]
    BadMagic,
    #[error("unsupported log version {0}")]
    UnsupportedVersion(u8),
    #[error("stream ends inside the header ({0} bytes)")]
    TruncatedHeader(usize),
    #[error("corrupt record: {0}")]
    CorruptRecord(String),
    #[error("record kind does not match stream mode")]
    MixedModes,
    #[error("value out of range: {0}")]
    OutOfRange(String),
}

/// What the stream stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogMode {
    Raw = 0,
    Processed = 1,
}

impl LogMode {
    pub fn record_bytes(self) -> usize {
        match self {
            LogMode::Raw => RAW_RECORD_BYTES,
            LogMode::Processed => PROCESSED_RECORD_BYTES,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogMode::Raw => "raw",
            LogMode::Processed => "processed",
        }
    }
}

impl core::str::FromStr for LogMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(LogMode::Raw),
            "processed" => Ok(LogMode::Processed),
            other => Err(format!("unknown log mode {other:?} (expected 'raw' or 'processed')")),
        }
    }
}

/// One stored record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRecord {
    /// One tri-axial sample in sensor counts.
    Raw { ax: i16, ay: i16, az: i16 },
    /// One processed window.
    Processed { window_start_s: u32, resp_centihz: u16, activity_micro_g: u32 },
}

impl LogRecord {
    pub fn mode(&self) -> LogMode {
        match self {
            LogRecord::Raw { .. } => LogMode::Raw,
            LogRecord::Processed { .. } => LogMode::Processed,
        }
    }
}

/// Decoded stream header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogHeader {
    pub mode: LogMode,
    pub fs: u16,
    pub counts_per_g: u16,
    pub record_count: u32,
}

/// Result of [`decode_log`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedLog {
    pub header: LogHeader,
    pub records: Vec<LogRecord>,
    /// True when the stream ended before `header.record_count` records.
    pub truncated: bool,
}

/// Serializes records into a download stream. All records must match `mode`.
pub fn encode_log(
    records: &[LogRecord],
    mode: LogMode,
    fs: u16,
    counts_per_g: u16,
) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(HEADER_BYTES + records.len() * mode.record_bytes());
    out.extend_from_slice(&LOG_MAGIC);
    out.push(LOG_VERSION);
    out.push(mode as u8);
    out.extend_from_slice(&fs.to_le_bytes());
    out.extend_from_slice(&counts_per_g.to_le_bytes());
    out.extend_from_slice(&(records.len() as u32).to_le_bytes());
    for r in records {
        if r.mode() != mode {
            return Err(CodecError::MixedModes);
        }
        match *r {
            LogRecord::Raw { ax, ay, az } => {
                out.extend_from_slice(&ax.to_le_bytes());
                out.extend_from_slice(&ay.to_le_bytes());
                out.extend_from_slice(&az.to_le_bytes());
            }
            LogRecord::Processed { window_start_s, resp_centihz, activity_micro_g } => {
                out.extend_from_slice(&window_start_s.to_le_bytes());
                out.extend_from_slice(&resp_centihz.to_le_bytes());
                out.extend_from_slice(&activity_micro_g.to_le_bytes());
            }
        }
    }
    Ok(out)
}

/// Parses a download stream. Returns all records that are completely present;
/// `truncated` reports whether the stream stopped early.
pub fn decode_log(bytes: &[u8]) -> Result<DecodedLog, CodecError> {
    if bytes.len() < 4 {
        return Err(if bytes == &LOG_MAGIC[..bytes.len()] {
            CodecError::TruncatedHeader(bytes.len())
        } else {
            CodecError::BadMagic
        });
    }
    if bytes[..4] != LOG_MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes.len() < HEADER_BYTES {
        return Err(CodecError::TruncatedHeader(bytes.len()));
    }
    let version = bytes[4];
    if version != LOG_VERSION {
        return Err(CodecError::UnsupportedVersion(version));
    }
    let mode = match bytes[5] {
        0 => LogMode::Raw,
        1 => LogMode::Processed,
        other => return Err(CodecError::CorruptRecord(format!("unknown mode byte {other}"))),
    };
    let fs = u16::from_le_bytes([bytes[6], bytes[7]]);
    let counts_per_g = u16::from_le_bytes([bytes[8], bytes[9]]);
    let record_count = u32::from_le_bytes([bytes[10], bytes[11], bytes[12], bytes[13]]);
    let header = LogHeader { mode, fs, counts_per_g, record_count };

    let payload = &bytes[HEADER_BYTES..];
    let size = mode.record_bytes();
    let complete = (payload.len() / size).min(record_count as usize);
    let full_scale = i32::from(counts_per_g) * FULL_SCALE_G as i32;

    let mut records = Vec::with_capacity(complete);
    for i in 0..complete {
        let chunk = &payload[i * size..(i + 1) * size];
        let record = match mode {
            LogMode::Raw => {
                let ax = i16::from_le_bytes([chunk[0], chunk[1]]);
                let ay = i16::from_le_bytes([chunk[2], chunk[3]]);
                let az = i16::from_le_bytes([chunk[4], chunk[5]]);
                for v in [ax, ay, az] {
                    if i32::from(v).abs() > full_scale {
                        return Err(CodecError::CorruptRecord(format!(
                            "record {i}: count {v} outside +-{full_scale}"
                        )));
                    }
                }
                LogRecord::Raw { ax, ay, az }
            }
            LogMode::Processed => {
                let window_start_s = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
                let resp_centihz = u16::from_le_bytes([chunk[4], chunk[5]]);
                let activity_micro_g =
                    u32::from_le_bytes([chunk[6], chunk[7], chunk[8], chunk[9]]);
                if resp_centihz > MAX_RESP_CENTIHZ {
                    return Err(CodecError::CorruptRecord(format!(
                        "record {i}: respiration {resp_centihz} centi-Hz above {MAX_RESP_CENTIHZ}"
                    )));
                }
                LogRecord::Processed { window_start_s, resp_centihz, activity_micro_g }
            }
        };
        records.push(record);
    }

    Ok(DecodedLog { header, truncated: complete < record_count as usize, records })
}

/// Quantizes one processed window for storage. The respiration frequency
/// must not exceed 8 Hz (800 centi-Hz) and the activity index must fit the
/// micro-g field.
pub fn quantize_window(w: &Window, window_start_s: f64) -> Result<LogRecord, CodecError> {
    if !(0.0..=u32::MAX as f64).contains(&window_start_s) {
        return Err(CodecError::OutOfRange(format!("window start {window_start_s} s")));
    }
    if !w.resp_freq.is_finite() || w.resp_freq < 0.0 {
        return Err(CodecError::OutOfRange(format!("respiration {}", w.resp_freq)));
    }
    let centihz = (w.resp_freq * 100.0).round();
    if centihz > f64::from(MAX_RESP_CENTIHZ) {
        return Err(CodecError::OutOfRange(format!(
            "respiration {} breaths/s above the 8 Hz format limit",
            w.resp_freq
        )));
    }
    if !w.activity.is_finite() || w.activity < 0.0 {
        return Err(CodecError::OutOfRange(format!("activity {}", w.activity)));
    }
    let micro = (w.activity * 1e6).round();
    if micro > u32::MAX as f64 {
        return Err(CodecError::OutOfRange(format!(
            "activity {} g does not fit the micro-g field",
            w.activity
        )));
    }
    Ok(LogRecord::Processed {
        window_start_s: window_start_s.round() as u32,
        resp_centihz: centihz as u16,
        activity_micro_g: micro as u32,
    })
}

/// Inverse of [`quantize_window`] for analysis: (breaths/s, g).
pub fn dequantize_processed(record: &LogRecord) -> Option<(f64, f64)> {
    match *record {
        LogRecord::Processed { resp_centihz, activity_micro_g, .. } => {
            Some((f64::from(resp_centihz) / 100.0, f64::from(activity_micro_g) / 1e6))
        }
        LogRecord::Raw { .. } => None,
    }
}

/// Quantizes one sample to sensor counts, saturating at the +-8 g full
/// scale like the real front end.
pub fn quantize_sample(ax: f64, ay: f64, az: f64, counts_per_g: u16) -> LogRecord {
    let full_scale = f64::from(counts_per_g) * FULL_SCALE_G;
    let q = |v: f64| (v * f64::from(counts_per_g)).round().clamp(-full_scale, full_scale) as i16;
    LogRecord::Raw { ax: q(ax), ay: q(ay), az: q(az) }
}

/// Inverse of [`quantize_sample`]: counts back to g.
pub fn dequantize_sample(record: &LogRecord, counts_per_g: u16) -> Option<(f64, f64, f64)> {
    match *record {
        LogRecord::Raw { ax, ay, az } => {
            let g = |v: i16| f64::from(v) / f64::from(counts_per_g);
            Some((g(ax), g(ay), g(az)))
        }
        LogRecord::Processed { .. } => None,
    }
}
