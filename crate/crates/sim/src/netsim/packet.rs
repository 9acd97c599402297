use wsnkm_core::codec::{HEADER_LEN, PAYLOAD_LEN};

/// Radio packet: 9-octet header and up to 32 octets of payload.
///
/// Header: kind (1), source (2), flood tag (4), fragment index (1),
/// fragment count (1). The flood tag is the first four octets of the
/// message hash and groups fragments of one message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub kind: u8,
    pub source: u16,
    pub flood_tag: u32,
    pub index: u8,
    pub count: u8,
    pub payload: Vec<u8>,
}

impl Packet {
    pub fn len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        out.push(self.kind);
        out.extend_from_slice(&self.source.to_be_bytes());
        out.extend_from_slice(&self.flood_tag.to_be_bytes());
        out.push(self.index);
        out.push(self.count);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Option<Packet> {
        if bytes.len() < HEADER_LEN || bytes.len() > HEADER_LEN + PAYLOAD_LEN {
            return None;
        }
        Some(Packet {
            kind: bytes[0],
            source: u16::from_be_bytes([bytes[1], bytes[2]]),
            flood_tag: u32::from_be_bytes([bytes[3], bytes[4], bytes[5], bytes[6]]),
            index: bytes[7],
            count: bytes[8],
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }
}

/// Splits a message into packets; an empty message still takes one packet.
pub fn fragment(kind: u8, source: u16, message: &[u8]) -> Vec<Packet> {
    let digest = wsnkm_core::crypto::hash(message);
    let tag = u32::from_be_bytes([digest.0[0], digest.0[1], digest.0[2], digest.0[3]]);
    let chunks: Vec<&[u8]> = if message.is_empty() { vec![&[][..]] } else { message.chunks(PAYLOAD_LEN).collect() };
    assert!(chunks.len() <= u8::MAX as usize, "message too long to fragment");
    let count = chunks.len() as u8;
    chunks
        .into_iter()
        .enumerate()
        .map(|(i, c)| Packet { kind, source, flood_tag: tag, index: i as u8, count, payload: c.to_vec() })
        .collect()
}

/// Reassembles one message from its fragments in any order. Returns `None`
/// if a fragment is missing or the set mixes messages.
pub fn reassemble(packets: &[Packet]) -> Option<Vec<u8>> {
    let first = packets.first()?;
    let mut slots: Vec<Option<&[u8]>> = vec![None; first.count as usize];
    for p in packets {
        if (p.kind, p.source, p.flood_tag, p.count) != (first.kind, first.source, first.flood_tag, first.count) {
            return None;
        }
        *slots.get_mut(p.index as usize)? = Some(&p.payload);
    }
    let mut out = Vec::new();
    for s in slots {
        out.extend_from_slice(s?);
    }
    Some(out)
}
