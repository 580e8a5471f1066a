use std::io::{self, ErrorKind, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use log::{debug, info, warn};

use super::config::DEFAULT_TIMEOUT_SECS;
use super::pool::DecoderPool;
use super::protocol::{encode_message, FrameReader, Message};
use super::session::{Session, DEFAULT_PARTIAL_INTERVAL};

#[derive(Debug, Clone)]
pub struct ServerOptions {
    /// Idle time after which a session gets ERROR 0x0005.
    pub timeout: Duration,
    pub partial_interval: usize,
}

impl Default for ServerOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(DEFAULT_TIMEOUT_SECS),
            partial_interval: DEFAULT_PARTIAL_INTERVAL,
        }
    }
}

/// Accepts connections forever, one thread and one session per connection.
pub fn serve(listener: TcpListener, pool: Arc<DecoderPool>, opts: ServerOptions) -> io::Result<()> {
    accept_loop(listener, pool, opts, Arc::new(AtomicBool::new(false)))
}

/// A server running on a background thread.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<io::Result<()>>>,
}

impl ServerHandle {
    pub fn spawn(listener: TcpListener, pool: Arc<DecoderPool>, opts: ServerOptions) -> io::Result<Self> {
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = stop.clone();
        let thread = std::thread::Builder::new()
            .name("seasr-accept".into())
            .spawn(move || accept_loop(listener, pool, opts, flag))?;
        Ok(Self {
            addr,
            stop,
            thread: Some(thread),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting. Sessions already running finish on their own.
    pub fn shutdown(mut self) -> io::Result<()> {
        self.stop_and_join()
    }

    fn stop_and_join(&mut self) -> io::Result<()> {
        let Some(t) = self.thread.take() else {
            return Ok(());
        };
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect(self.addr);
        t.join().unwrap_or_else(|_| Err(io::Error::other("accept thread panicked")))
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.stop_and_join();
    }
}

fn accept_loop(
    listener: TcpListener,
    pool: Arc<DecoderPool>,
    opts: ServerOptions,
    stop: Arc<AtomicBool>,
) -> io::Result<()> {
    info!(
        "event=listen addr={} languages={}",
        listener.local_addr()?,
        pool.languages().collect::<Vec<_>>().join(",")
    );
    for conn in listener.incoming() {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let stream = match conn {
            Ok(s) => s,
            Err(e) => {
                warn!("event=accept-error err={e}");
                continue;
            }
        };
        let (pool, opts) = (pool.clone(), opts.clone());
        let spawned = std::thread::Builder::new()
            .name("seasr-session".into())
            .spawn(move || {
                let peer = stream.peer_addr().ok();
                if let Err(e) = handle_connection(stream, pool, &opts) {
                    debug!("event=connection-error peer={peer:?} err={e}");
                }
            });
        if let Err(e) = spawned {
            warn!("event=spawn-error err={e}");
        }
    }
    Ok(())
}

/// Runs one session over a stream until it closes.
pub fn handle_connection(mut stream: TcpStream, pool: Arc<DecoderPool>, opts: &ServerOptions) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let mut session = Session::new(pool, opts.partial_interval);
    let mut reader = FrameReader::new();
    let mut buf = vec![0u8; 64 * 1024];
    let mut last_message = Instant::now();

    while !session.is_closed() {
        let Some(left) = opts.timeout.checked_sub(last_message.elapsed()).filter(|d| !d.is_zero()) else {
            send(&mut stream, session.timeout())?;
            break;
        };
        stream.set_read_timeout(Some(left))?;
        let n = match stream.read(&mut buf) {
            Ok(0) => {
                if !session.is_closed() && session.language().is_some() {
                    info!("session={} event=disconnect", session.id());
                }
                return Ok(());
            }
            Ok(n) => n,
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut | ErrorKind::Interrupted) => {
                continue;
            }
            Err(e) => return Err(e),
        };
        reader.push(&buf[..n]);
        loop {
            match reader.next_message() {
                Ok(Some(m)) => {
                    last_message = Instant::now();
                    let out = session.handle(m);
                    send(&mut stream, out)?;
                    if session.is_closed() {
                        break;
                    }
                }
                Ok(None) => break,
                Err(e) => {
                    send(&mut stream, session.malformed_stream(&e.to_string()))?;
                    break;
                }
            }
        }
    }
    linger_close(stream);
    Ok(())
}

fn send(stream: &mut TcpStream, msgs: Vec<Message>) -> io::Result<()> {
    for m in msgs {
        let bytes = encode_message(&m).map_err(|e| io::Error::new(ErrorKind::InvalidData, e))?;
        stream.write_all(&bytes)?;
    }
    stream.flush()
}

/// Half-closes, then drains briefly so unread client bytes do not turn the
/// close into a reset that could discard our last reply.
fn linger_close(mut stream: TcpStream) {
    let _ = stream.shutdown(Shutdown::Write);
    let deadline = Instant::now() + Duration::from_millis(500);
    let mut sink = [0u8; 4096];
    while let Some(left) = deadline.checked_duration_since(Instant::now()).filter(|d| !d.is_zero()) {
        if stream.set_read_timeout(Some(left)).is_err() {
            break;
        }
        match stream.read(&mut sink) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
    }
}
